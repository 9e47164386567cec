//! Golden data for the acceptance suite, compiled into the binary from
//! `fixtures/v1`.

use serde::Deserialize;

pub const BOKSTEDT: &str = include_str!("../fixtures/v1/bokstedt.json");
pub const STEENROD: &str = include_str!("../fixtures/v1/steenrod.json");
pub const HOCHSCHILD: &str = include_str!("../fixtures/v1/hochschild.json");
pub const COACTION: &str = include_str!("../fixtures/v1/coaction.json");
pub const NISHIDA: &str = include_str!("../fixtures/v1/nishida.json");
pub const ADAMS: &str = include_str!("../fixtures/v1/adams.json");

#[derive(Debug, Deserialize)]
pub struct Factor {
    pub degree: u32,
    pub kind: String,
}

#[derive(Debug, Deserialize)]
pub struct BokstedtCase {
    pub spectrum: String,
    pub p: u32,
    pub maxdeg: u32,
    pub closed_form: String,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Deserialize)]
pub struct Bokstedt {
    pub cases: Vec<BokstedtCase>,
}

#[derive(Debug, Deserialize)]
pub struct RankCase {
    pub subalgebra: String,
    pub rank: usize,
}

#[derive(Debug, Deserialize)]
pub struct QuotientCase {
    pub subalgebra: String,
    pub ideal: Vec<String>,
    pub total_rank: usize,
}

#[derive(Debug, Deserialize)]
pub struct MapCase {
    pub map: String,
    pub source_ideal: Vec<String>,
    pub source_shift: i32,
    pub target_ideal: Vec<String>,
    pub kernel_rank: usize,
    pub cokernel_rank: usize,
    pub generator: String,
    pub annihilator: Vec<String>,
    pub listed: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct AdemCase {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Deserialize)]
pub struct Steenrod {
    pub total_ranks: Vec<RankCase>,
    pub quotient: QuotientCase,
    pub sq4_map: MapCase,
    pub adem: Vec<AdemCase>,
}

#[derive(Debug, Deserialize)]
pub struct HhClosedForms {
    pub primes: Vec<u32>,
    pub maxdeg: u32,
    pub polynomial_degrees: Vec<u32>,
    pub exterior_degrees: Vec<u32>,
}

#[derive(Debug, Deserialize)]
pub struct SquareZeroCase {
    pub p: u32,
    pub v: Vec<u32>,
}

#[derive(Debug, Deserialize)]
pub struct Hh1Example {
    pub p: u32,
    pub v: Vec<u32>,
    pub maxdeg: u32,
    pub hh1_rank: usize,
}

#[derive(Debug, Deserialize)]
pub struct SquareZero {
    pub qmax: usize,
    pub maxdeg: u32,
    pub cases: Vec<SquareZeroCase>,
    pub hh1_example: Hh1Example,
}

#[derive(Debug, Deserialize)]
pub struct Idempotent {
    pub qmax: usize,
    pub rank_q0: usize,
}

#[derive(Debug, Deserialize)]
pub struct BarRoundtrip {
    pub qmax: usize,
    pub maxdeg: u32,
}

#[derive(Debug, Deserialize)]
pub struct Hochschild {
    pub closed_forms: HhClosedForms,
    pub square_zero: SquareZero,
    pub idempotent: Idempotent,
    pub bar_roundtrip: BarRoundtrip,
}

#[derive(Debug, Deserialize)]
pub struct Formula {
    pub spectrum: String,
    pub generator: String,
    pub terms: Vec<(String, u32, String)>,
}

#[derive(Debug, Deserialize)]
pub struct Coaction {
    pub maxdeg: u32,
    pub formulas: Vec<Formula>,
}

#[derive(Debug, Deserialize)]
pub struct DualOp {
    pub r: u32,
    pub x: String,
    pub value: String,
}

#[derive(Debug, Deserialize)]
pub struct Vanishing {
    pub x: String,
    pub s: u32,
    pub operators: Vec<u32>,
    #[serde(default)]
    pub kernel_letter: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct Nishida {
    pub spectrum: String,
    pub maxdeg: u32,
    pub dual_operations: Vec<DualOp>,
    pub vanishing: Vec<Vanishing>,
}

#[derive(Debug, Deserialize)]
pub struct AdamsTarget {
    pub target: String,
    pub lambda_degrees: [u32; 2],
    pub mu_degree: u32,
    pub q_mu: Option<String>,
    pub r_initial: [u32; 2],
    pub s_initial: [u32; 2],
    /// `(n, r(n), s(n))`
    pub schedule: Vec<(u32, u32, u32)>,
}

#[derive(Debug, Deserialize)]
pub struct Cobar {
    pub comodules: usize,
    pub max_basis: usize,
    pub max_internal_degree: u32,
    pub smax: u32,
    pub tmax: u32,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
pub struct Adams {
    pub maxdeg: u32,
    pub identity_nmax: u32,
    pub targets: Vec<AdamsTarget>,
    pub cobar: Cobar,
}

fn parse<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).map_err(|e| anyhow::anyhow!("fixture {name}: {e}"))
}

pub fn bokstedt() -> anyhow::Result<Bokstedt> {
    parse("bokstedt", BOKSTEDT)
}

pub fn steenrod() -> anyhow::Result<Steenrod> {
    parse("steenrod", STEENROD)
}

pub fn hochschild() -> anyhow::Result<Hochschild> {
    parse("hochschild", HOCHSCHILD)
}

pub fn coaction() -> anyhow::Result<Coaction> {
    parse("coaction", COACTION)
}

pub fn nishida() -> anyhow::Result<Nishida> {
    parse("nishida", NISHIDA)
}

pub fn adams() -> anyhow::Result<Adams> {
    parse("adams", ADAMS)
}
