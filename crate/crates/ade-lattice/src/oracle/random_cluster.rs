use std::collections::BTreeMap;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct RcTally {
    pub hist: BTreeMap<u32, u64>,
}

pub fn rc_partition() -> Result<RcTally> { unimplemented!() }
pub fn rc_interface_law() -> Result<()> { unimplemented!() }
