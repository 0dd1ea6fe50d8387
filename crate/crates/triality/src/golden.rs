//! Every expected value checked by the pipeline, in one place.

use triality_core::FingerprintCatalog;
use triality_core::StructureFingerprint;

/// Which orthogonal group a run is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Q2,
    Q3,
}

impl Case {
    pub fn q(self) -> u64 {
        match self {
            Case::Q2 => 2,
            Case::Q3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::Q2 => "q2",
            Case::Q3 => "q3",
        }
    }

    pub fn expectations(self) -> &'static GoldenExpectations {
        match self {
            Case::Q2 => &Q2,
            Case::Q3 => &Q3,
        }
    }
}

/// One row of the subgroup table: structure name, subgroup order and the
/// sizes of the centralizer orbits giving that structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub structure: &'static str,
    pub order: u64,
    pub orbits: &'static [u64],
}

#[derive(Clone, Copy, Debug)]
pub struct GoldenExpectations {
    pub case: Case,
    /// |O8+(q)|.
    pub s_order: u128,
    /// |⟨S, ρ⟩| = 3|S|.
    pub s_rho_order: u128,
    /// Order of the ambient group of the generator data (q = 3 only).
    pub ambient_order: Option<u128>,
    /// |C_S(ρ)| = |G2(q)|.
    pub c_rho: u128,
    /// |C_S(ϱ)|.
    pub c_vrho: u128,
    pub class_size: u64,
    pub rows: &'static [TableRow],
    /// Word for ϱ in the labels of the generator set.
    pub vrho_word: &'static str,
    /// Conjugating letters for the α(ρ) witness ⟨ρ, ρ^x, ρ^y⟩.
    pub alpha_rho_witness: &'static [&'static str],
    /// Conjugating letters for the α(ϱ) witness ⟨ϱ, ϱ^x⟩.
    pub alpha_vrho_witness: &'static [&'static str],
}

impl GoldenExpectations {
    pub fn orbit_count(&self) -> usize {
        self.rows.iter().map(|r| r.orbits.len()).sum()
    }

    /// Orbit sizes sorted increasingly.
    pub fn orbit_sizes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.rows.iter().flat_map(|r| r.orbits.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Subgroup orders, one per orbit, sorted increasingly.
    pub fn subgroup_orders(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.rows.iter().flat_map(|r| r.orbits.iter().map(move |_| r.order)).collect();
        v.sort_unstable();
        v
    }

    /// `(orbit size, structure)` pairs, sorted.
    pub fn labelled_orbits(&self) -> Vec<(u64, String)> {
        let mut v: Vec<(u64, String)> =
            self.rows.iter().flat_map(|r| r.orbits.iter().map(move |&s| (s, r.structure.to_string()))).collect();
        v.sort();
        v
    }
}

/// |G2(q)| = q^6 (q^6 - 1)(q^2 - 1).
pub fn g2_order(q: u128) -> u128 {
    q.pow(6) * (q.pow(6) - 1) * (q * q - 1)
}

/// |O8+(q)| = q^12 (q^2 - 1)(q^4 - 1)^2 (q^6 - 1) / gcd(4, q^4 - 1).
pub fn o8_plus_order(q: u128) -> u128 {
    let d = triality_core::gcd(4, q.pow(4) - 1);
    q.pow(12) * (q * q - 1) * (q.pow(4) - 1).pow(2) * (q.pow(6) - 1) / d
}

pub static Q2: GoldenExpectations = GoldenExpectations {
    case: Case::Q2,
    s_order: 174_182_400,
    s_rho_order: 522_547_200,
    ambient_order: None,
    // |C_S(ρ)| = 12096 = |G2(2)|
    c_rho: 12_096,
    // |C_S(ϱ)| = 216 = |PGU3(2)|
    c_vrho: 216,
    class_size: 14_400,
    rows: &[
        TableRow { structure: "3", order: 3, orbits: &[1] },
        TableRow { structure: "3^2", order: 9, orbits: &[56] },
        TableRow { structure: "A4", order: 12, orbits: &[63, 63, 63] },
        TableRow { structure: "SL2(3)", order: 24, orbits: &[378, 1512] },
        TableRow { structure: "3^(1+2)+", order: 27, orbits: &[56, 56, 56] },
        TableRow { structure: "3xSL2(3)", order: 72, orbits: &[1512] },
        TableRow { structure: "(3^3:2^2):3", order: 324, orbits: &[2016, 2016, 2016] },
        TableRow { structure: "[2^7]:3^(1+2)+", order: 3456, orbits: &[1512, 1512, 1512] },
    ],
    // ϱ = (ρ x^3)^4
    vrho_word: "(r*x^3)^4",
    alpha_rho_witness: &["x", "y"],
    alpha_vrho_witness: &["x"],
};

pub static Q3: GoldenExpectations = GoldenExpectations {
    case: Case::Q3,
    s_order: 4_952_179_814_400,
    s_rho_order: 14_856_539_443_200,
    // O8+(3):S4
    ambient_order: Some(118_852_315_545_600),
    // |C_S(ρ)| = 4245696 = |G2(3)|
    c_rho: 4_245_696,
    // |C_S(ϱ)| = 5832 = |[3^5].SL2(3)|
    c_vrho: 5_832,
    class_size: 1_166_400,
    rows: &[
        TableRow { structure: "3", order: 3, orbits: &[1] },
        TableRow { structure: "3^2", order: 9, orbits: &[728] },
        TableRow { structure: "A4", order: 12, orbits: &[351, 351, 351] },
        TableRow { structure: "SL2(3)", order: 24, orbits: &[44_226] },
        TableRow { structure: "3^(1+2)+", order: 27, orbits: &[17_472, 728, 728, 728] },
        TableRow { structure: "3xSL2(3)", order: 72, orbits: &[176_904] },
        TableRow { structure: "(3^3:2^2):3", order: 324, orbits: &[78_624, 78_624, 78_624] },
        TableRow { structure: "[2^7]:3^(1+2)+", order: 3456, orbits: &[176_904, 176_904, 176_904] },
        TableRow { structure: "[3^5]", order: 243, orbits: &[157_248] },
    ],
    // ϱ = (ρ x^4 y)^4
    vrho_word: "(r*x^4*y)^4",
    alpha_rho_witness: &["x", "y"],
    alpha_vrho_witness: &["x"],
};

/// Pinned fingerprints of the structures without an independent
/// construction.
pub const GOLDEN_FINGERPRINTS: &str = include_str!("../golden/fingerprints.txt");

/// Reference constructions plus the pinned snapshots.
pub fn catalog() -> FingerprintCatalog {
    let mut catalog = FingerprintCatalog::reference();
    let pinned = FingerprintCatalog::from_text(GOLDEN_FINGERPRINTS).expect("pinned fingerprints parse");
    catalog.merge(&pinned);
    catalog
}

/// Fingerprint pinned under `name`, if any.
pub fn pinned(name: &str) -> Option<StructureFingerprint> {
    FingerprintCatalog::from_text(GOLDEN_FINGERPRINTS).ok()?.get(name).cloned()
}
