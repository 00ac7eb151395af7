use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    pub modes: usize,
}

/// Ordered named subsystems. In xp ordering subsystem k with offset o owns
/// x-indices `o..o+k` and p-indices `m+o..m+o+k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub subsystems: Vec<Subsystem>,
}

impl Partition {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::InvalidPartition("empty subsystem name".into()));
            }
            if subsystems[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::InvalidPartition(format!("duplicate subsystem name {}", s.name)));
            }
        }
        Ok(Partition { subsystems })
    }

    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(n, k)| Subsystem { name: n.to_string(), modes: *k }).collect())
    }

    /// Single subsystem holding all modes.
    pub fn single(name: &str, modes: usize) -> Self {
        Partition { subsystems: vec![Subsystem { name: name.into(), modes }] }
    }

    pub fn total_modes(&self) -> usize {
        self.subsystems.iter().map(|s| s.modes).sum()
    }

    pub fn names(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn subsystem(&self, name: &str) -> Option<&Subsystem> {
        self.subsystems.iter().find(|s| s.name == name)
    }

    fn offset(&self, name: &str) -> Option<(usize, usize)> {
        let mut o = 0;
        for s in &self.subsystems {
            if s.name == name {
                return Some((o, s.modes));
            }
            o += s.modes;
        }
        None
    }

    fn check_names(&self, names: &[&str]) -> Result<()> {
        for n in names {
            if self.subsystem(n).is_none() {
                return Err(Error::InvalidPartition(format!("unknown subsystem {n}")));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidPartition(format!("subsystem {n} listed twice")));
            }
        }
        Ok(())
    }

    /// Sub-partition in this partition's order.
    pub fn select(&self, names: &[&str]) -> Result<Partition> {
        self.check_names(names)?;
        Ok(Partition {
            subsystems: self.subsystems.iter().filter(|s| names.contains(&s.name.as_str())).cloned().collect(),
        })
    }

    /// Global xp indices of the named subsystems: all their x-indices, then all their
    /// p-indices, in partition order.
    pub fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let sel = self.select(names)?;
        let m = self.total_modes();
        let mut xs = Vec::new();
        let mut ps = Vec::new();
        for s in &sel.subsystems {
            let (o, k) = self.offset(&s.name).expect("checked");
            xs.extend(o..o + k);
            ps.extend(m + o..m + o + k);
        }
        xs.extend(ps);
        Ok(xs)
    }

    /// Mode offsets of each subsystem in the global mode list, used for mode-wise I/O.
    pub fn mode_range(&self, name: &str) -> Option<std::ops::Range<usize>> {
        self.offset(name).map(|(o, k)| o..o + k)
    }

    pub fn concat(&self, other: &Partition) -> Result<Partition> {
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        Partition::new(subs)
    }
}

/// A bipartition of subsystem names into an A side and a B side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl Split {
    pub fn new(a: &[&str], b: &[&str]) -> Self {
        Split { a: a.iter().map(|s| s.to_string()).collect(), b: b.iter().map(|s| s.to_string()).collect() }
    }

    /// The default `A | B` split.
    pub fn ab() -> Self {
        Split::new(&["A"], &["B"])
    }

    pub fn a_names(&self) -> Vec<&str> {
        self.a.iter().map(String::as_str).collect()
    }

    pub fn b_names(&self) -> Vec<&str> {
        self.b.iter().map(String::as_str).collect()
    }

    pub fn all_names(&self) -> Vec<&str> {
        self.a_names().into_iter().chain(self.b_names()).collect()
    }

    pub fn validate(&self, p: &Partition) -> Result<()> {
        if self.a.is_empty() || self.b.is_empty() {
            return Err(Error::InvalidPartition("both sides of a split must be non-empty".into()));
        }
        p.select(&self.all_names()).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xp_indices_interleave_subsystems() {
        let p = Partition::from_pairs(&[("A", 1), ("B", 2), ("E", 1)]).unwrap();
        assert_eq!(p.indices(&["A"]).unwrap(), vec![0, 4]);
        assert_eq!(p.indices(&["B"]).unwrap(), vec![1, 2, 5, 6]);
        assert_eq!(p.indices(&["E", "A"]).unwrap(), vec![0, 3, 4, 7]);
    }

    #[test]
    fn duplicate_and_unknown_names_are_rejected() {
        assert!(Partition::from_pairs(&[("A", 1), ("A", 1)]).is_err());
        let p = Partition::from_pairs(&[("A", 1), ("B", 1)]).unwrap();
        assert!(p.indices(&["C"]).is_err());
        assert!(p.indices(&["A", "A"]).is_err());
        assert!(Split::new(&["A"], &[]).validate(&p).is_err());
        assert!(Split::ab().validate(&p).is_ok());
    }
}
