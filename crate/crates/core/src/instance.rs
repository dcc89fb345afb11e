//! Random fair-division instances and allocations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{draw_item_spec, Distribution, DistributionSpec, FamilyMixture};
use crate::error::InstanceError;
use crate::rng::{stream, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Entries are utilities; agents want more.
    Goods,
    /// Entries are disutilities; agents want less.
    Chores,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Goods => "goods",
            Mode::Chores => "chores",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "goods" => Ok(Mode::Goods),
            "chores" => Ok(Mode::Chores),
            other => Err(format!("unknown mode `{other}` (expected goods or chores)")),
        }
    }
}

/// Read access to an n x m value matrix.
///
/// The sampling allocator is written against this trait so tests can count
/// exactly which entries it reads.
pub trait ValueMatrix {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn value(&self, agent: usize, item: usize) -> f64;
}

/// An n-agent, m-item instance with a dense row-major value matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    n: usize,
    m: usize,
    mode: Mode,
    seed: u64,
    item_specs: Vec<DistributionSpec>,
    values: Vec<f64>,
}

/// On-disk form: values as nested rows.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    m: usize,
    mode: Mode,
    seed: u64,
    item_specs: Vec<DistributionSpec>,
    values: Vec<Vec<f64>>,
}

impl From<Instance> for InstanceFile {
    fn from(inst: Instance) -> Self {
        let values = inst.values.chunks(inst.m).map(<[f64]>::to_vec).collect();
        InstanceFile {
            n: inst.n,
            m: inst.m,
            mode: inst.mode,
            seed: inst.seed,
            item_specs: inst.item_specs,
            values,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = InstanceError;

    fn try_from(f: InstanceFile) -> Result<Self, InstanceError> {
        if f.values.len() != f.n {
            return Err(InstanceError::ShapeMismatch {
                expected: f.n,
                got: f.values.len(),
            });
        }
        if let Some(row) = f.values.iter().find(|r| r.len() != f.m) {
            return Err(InstanceError::ShapeMismatch {
                expected: f.m,
                got: row.len(),
            });
        }
        let flat = f.values.into_iter().flatten().collect();
        let mut inst = Instance::from_values(f.mode, f.n, f.m, flat, f.item_specs)?;
        inst.seed = f.seed;
        Ok(inst)
    }
}

impl Instance {
    /// Draws an instance: one law per item from `mixture`, then n i.i.d. values
    /// per item. Item j's law and values come from their own RNG streams, so the
    /// matrix for a given seed does not depend on generation order and adding
    /// agents only appends to each column.
    pub fn generate(
        n: usize,
        m: usize,
        mode: Mode,
        mixture: &FamilyMixture,
        seed: u64,
    ) -> Result<Self, InstanceError> {
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDimension { n, m });
        }
        mixture.validate()?;
        let mut values = vec![0.0; n * m];
        let mut item_specs = Vec::with_capacity(m);
        for j in 0..m {
            let spec = draw_item_spec(mixture, &mut stream(seed, &[tag::ITEM_SPEC, j as u64]));
            let dist = Distribution::new(spec.clone())?;
            let mut rng = stream(seed, &[tag::ITEM_VALUES, j as u64]);
            for i in 0..n {
                values[i * m + j] = dist.sample(&mut rng);
            }
            item_specs.push(spec);
        }
        Ok(Instance {
            n,
            m,
            mode,
            seed,
            item_specs,
            values,
        })
    }

    /// Builds an instance from an explicit row-major matrix.
    pub fn from_values(
        mode: Mode,
        n: usize,
        m: usize,
        values: Vec<f64>,
        item_specs: Vec<DistributionSpec>,
    ) -> Result<Self, InstanceError> {
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDimension { n, m });
        }
        if values.len() != n * m {
            return Err(InstanceError::ShapeMismatch {
                expected: n * m,
                got: values.len(),
            });
        }
        if item_specs.len() != m {
            return Err(InstanceError::ShapeMismatch {
                expected: m,
                got: item_specs.len(),
            });
        }
        for spec in &item_specs {
            spec.validate()?;
        }
        if let Some(k) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(InstanceError::ValueOutOfRange {
                agent: k / m,
                item: k % m,
                value: values[k],
            });
        }
        Ok(Instance {
            n,
            m,
            mode,
            seed: 0,
            item_specs,
            values,
        })
    }

    /// Convenience: rows of values, every item labelled Uniform[0, 1].
    pub fn from_rows(mode: Mode, rows: &[&[f64]]) -> Result<Self, InstanceError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let values: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        let specs = vec![DistributionSpec::Uniform { a: 0.0, b: 1.0 }; m];
        Instance::from_values(mode, n, m, values, specs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn item_specs(&self) -> &[DistributionSpec] {
        &self.item_specs
    }

    #[inline]
    pub fn value(&self, agent: usize, item: usize) -> f64 {
        self.values[agent * self.m + item]
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.m..(agent + 1) * self.m]
    }

    /// Value of agent `agent` for all items, `u_i(M)`.
    pub fn total_value(&self, agent: usize) -> f64 {
        self.row(agent).iter().sum()
    }

    /// Additive value of `bundle` to `agent`.
    pub fn bundle_value(&self, agent: usize, bundle: &[usize]) -> Result<f64, InstanceError> {
        if agent >= self.n {
            return Err(InstanceError::AgentOutOfRange { agent, n: self.n });
        }
        let row = self.row(agent);
        bundle.iter().try_fold(0.0, |acc, &j| {
            row.get(j)
                .map(|v| acc + v)
                .ok_or(InstanceError::ItemOutOfRange { item: j, m: self.m })
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read_json(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

impl ValueMatrix for Instance {
    fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.m
    }

    fn value(&self, agent: usize, item: usize) -> f64 {
        Instance::value(self, agent, item)
    }
}

/// Which procedure produced an allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ArgMax,
    Sampling,
    EfSmall,
    PropTwoStage,
    PropLinear,
    ChoresEfSmall,
    External,
}

/// A partition of the m items into n bundles (bundle i belongs to agent i).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
    provenance: Provenance,
}

impl Allocation {
    /// Validates that `bundles` partitions `0..m`. Bundles are stored sorted.
    pub fn new(
        m: usize,
        mut bundles: Vec<Vec<usize>>,
        provenance: Provenance,
    ) -> Result<Self, InstanceError> {
        let mut seen = vec![false; m];
        for bundle in &mut bundles {
            bundle.sort_unstable();
            for &j in bundle.iter() {
                let slot = seen
                    .get_mut(j)
                    .ok_or(InstanceError::ItemOutOfRange { item: j, m })?;
                if *slot {
                    return Err(InstanceError::Overlap(j));
                }
                *slot = true;
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(InstanceError::Omitted(j));
        }
        Ok(Allocation {
            bundles,
            provenance,
        })
    }

    /// Builds bundles from a per-item owner vector.
    pub fn from_owners(
        n: usize,
        owners: &[usize],
        provenance: Provenance,
    ) -> Result<Self, InstanceError> {
        let mut bundles = vec![Vec::new(); n];
        for (j, &i) in owners.iter().enumerate() {
            bundles
                .get_mut(i)
                .ok_or(InstanceError::AgentOutOfRange { agent: i, n })?
                .push(j);
        }
        Ok(Allocation {
            bundles,
            provenance,
        })
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent]
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn m(&self) -> usize {
        self.bundles.iter().map(Vec::len).sum()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Owner of each item.
    pub fn owners(&self) -> Vec<usize> {
        let mut owners = vec![0; self.m()];
        for (i, bundle) in self.bundles.iter().enumerate() {
            for &j in bundle {
                owners[j] = i;
            }
        }
        owners
    }

    /// Checks that this allocation fits `instance` (agent and item counts).
    pub fn check_fits(&self, instance: &Instance) -> Result<(), InstanceError> {
        if self.n() != instance.n() {
            return Err(InstanceError::BundleCount {
                n: instance.n(),
                got: self.n(),
            });
        }
        if self.m() != instance.m() {
            return Err(InstanceError::ShapeMismatch {
                expected: instance.m(),
                got: self.m(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::MixtureName;
    use proptest::prelude::*;

    #[test]
    fn generation_is_deterministic() {
        let mix = FamilyMixture::new(MixtureName::UniformOnly);
        let a = Instance::generate(2, 3, Mode::Goods, &mix, 7).unwrap();
        let b = Instance::generate(2, 3, Mode::Goods, &mix, 7).unwrap();
        assert_eq!(a, b);
        let c = Instance::generate(2, 3, Mode::Goods, &mix, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn adding_agents_keeps_existing_rows() {
        let mix = FamilyMixture::new(MixtureName::BetaUniform);
        let small = Instance::generate(3, 20, Mode::Goods, &mix, 99).unwrap();
        let big = Instance::generate(5, 20, Mode::Goods, &mix, 99).unwrap();
        for i in 0..3 {
            assert_eq!(small.row(i), big.row(i));
        }
        assert_eq!(small.item_specs(), big.item_specs());
    }

    #[test]
    fn entries_within_unit_interval() {
        for name in [
            MixtureName::BetaUniform,
            MixtureName::NormalUniform,
            MixtureName::UniformOnly,
            MixtureName::DiscreteAtom1,
        ] {
            let inst =
                Instance::generate(10, 50, Mode::Goods, &FamilyMixture::new(name), 3).unwrap();
            assert!((0..10).all(|i| inst.row(i).iter().all(|v| (0.0..=1.0).contains(v))));
        }
    }

    #[test]
    fn degenerate_single_cell() {
        let inst = Instance::generate(
            1,
            1,
            Mode::Goods,
            &FamilyMixture::new(MixtureName::UniformOnly),
            1,
        )
        .unwrap();
        assert_eq!((inst.n(), inst.m()), (1, 1));
        let alloc = Allocation::from_owners(1, &[0], Provenance::External).unwrap();
        assert_eq!(alloc.bundle(0), &[0]);
        assert!(Instance::generate(
            0,
            1,
            Mode::Goods,
            &FamilyMixture::new(MixtureName::UniformOnly),
            1
        )
        .is_err());
    }

    #[test]
    fn bundle_values() {
        let inst = Instance::from_rows(Mode::Goods, &[&[0.1, 0.2, 0.3]]).unwrap();
        assert!((inst.bundle_value(0, &[0, 2]).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(inst.bundle_value(0, &[]).unwrap(), 0.0);
        assert_eq!(
            inst.bundle_value(0, &[0, 1, 2]).unwrap(),
            inst.total_value(0)
        );
        assert!(matches!(
            inst.bundle_value(1, &[0]),
            Err(InstanceError::AgentOutOfRange { .. })
        ));
        assert!(matches!(
            inst.bundle_value(0, &[3]),
            Err(InstanceError::ItemOutOfRange { .. })
        ));
    }

    #[test]
    fn allocation_validation() {
        assert!(Allocation::new(3, vec![vec![0, 1], vec![2]], Provenance::External).is_ok());
        assert_eq!(
            Allocation::new(3, vec![vec![0, 1], vec![1, 2]], Provenance::External),
            Err(InstanceError::Overlap(1))
        );
        assert_eq!(
            Allocation::new(3, vec![vec![0], vec![2]], Provenance::External),
            Err(InstanceError::Omitted(1))
        );
        assert!(Allocation::new(2, vec![vec![0, 5]], Provenance::External).is_err());
    }

    #[test]
    fn json_dump_round_trips_bit_exactly() {
        let inst = Instance::generate(
            4,
            9,
            Mode::Chores,
            &FamilyMixture::new(MixtureName::NormalUniform),
            12,
        )
        .unwrap();
        let json = inst.to_json();
        let back: Instance = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inst);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["n", "m", "mode", "seed", "item_specs", "values"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    proptest! {
        #[test]
        fn bundle_value_is_additive(
            row in proptest::collection::vec(0.0f64..=1.0, 1..12),
            mask in proptest::collection::vec(0u8..3, 12),
        ) {
            let m = row.len();
            let inst = Instance::from_rows(Mode::Goods, &[&row]).unwrap();
            let a: Vec<usize> = (0..m).filter(|&j| mask[j] == 1).collect();
            let b: Vec<usize> = (0..m).filter(|&j| mask[j] == 2).collect();
            let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
            let lhs = inst.bundle_value(0, &ab).unwrap();
            let rhs = inst.bundle_value(0, &a).unwrap() + inst.bundle_value(0, &b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}
