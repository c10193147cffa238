//! Named verification targets with serializable outcomes, shared by the
//! command-line driver and the acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::buildings::{
    building, coset_partition, join_suspension_with_symplectic, partition_fixed_points, suspension_model, tits_gl,
    BuildingError, BuildingKind, JoinReport, SphereCountReport,
};
use crate::cyclolin::CycloError;
use crate::gflin::{GfError, SymplecticSpace};
use crate::guard::GuardError;
use crate::homology::{homology, induced_maps, mayer_vietoris_check, ChainMap, HomologyError, HomologyReport};
use crate::poset::{find_isomorphism, random_poset, FinPoset, PosetError, PosetMap};
use crate::repdecomp::{
    check_homomorphism, gamma_character_check, isotypical_components, verify_swap_refinement, verify_rank_one_translation_fixed,
    verify_coisotropic_correspondence, verify_subspace_pair_retraction, CharacterReport, SwapRefinementReport, RankOneTranslationReport, HeisGroup, RepError,
    CoisotropicCorrespondenceReport, SubspacePairReport,
};

/// Version tag carried by every JSON report.
pub const SCHEMA: &str = "decomp-lab/1";

/// Random group-law spot checks per character run.
pub const HOMOMORPHISM_PAIRS: usize = 200;
/// Random posets per subdivision run.
pub const RANDOM_POSETS: usize = 50;

/// Why a verification could not produce a report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Guard(GuardError),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<GuardError> for VerifyError {
    fn from(e: GuardError) -> Self {
        VerifyError::Guard(e)
    }
}

impl From<GfError> for VerifyError {
    fn from(e: GfError) -> Self {
        match e {
            GfError::Guard(g) => VerifyError::Guard(g),
            GfError::NotPrime(_) => VerifyError::Invalid(e.to_string()),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

impl From<CycloError> for VerifyError {
    fn from(e: CycloError) -> Self {
        match e {
            CycloError::Guard(g) => VerifyError::Guard(g),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

impl From<PosetError> for VerifyError {
    fn from(e: PosetError) -> Self {
        match e {
            PosetError::Guard(g) => VerifyError::Guard(g),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

impl From<HomologyError> for VerifyError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Guard(g) => VerifyError::Guard(g),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

impl From<BuildingError> for VerifyError {
    fn from(e: BuildingError) -> Self {
        match e {
            BuildingError::Guard(g) => VerifyError::Guard(g),
            BuildingError::Gf(g) => g.into(),
            BuildingError::Poset(g) => g.into(),
            BuildingError::Homology(g) => g.into(),
            BuildingError::NotPrime(_) | BuildingError::ZeroDimension => VerifyError::Invalid(e.to_string()),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

impl From<RepError> for VerifyError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Guard(g) => VerifyError::Guard(g),
            RepError::Gf(g) => g.into(),
            RepError::Cyclo(g) => g.into(),
            RepError::Poset(g) => g.into(),
            RepError::Homology(g) => g.into(),
            RepError::Building(g) => g.into(),
            RepError::NotPrime(_) | RepError::ZeroDimension => VerifyError::Invalid(e.to_string()),
            other => VerifyError::Internal(other.to_string()),
        }
    }
}

/// A verification target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Building(BuildingKind),
    CoisotropicCorrespondence,
    SubspacePairs,
    Isotypical,
    Character,
    Subdivision,
    Suspension,
    PartitionFixed,
    SwapRefinement,
    RankOneTranslation,
    SymplecticJoin,
}

impl Target {
    /// Targets accepted by `verify`.
    pub const VERIFY: [Target; 10] = [
        Target::CoisotropicCorrespondence,
        Target::SubspacePairs,
        Target::PartitionFixed,
        Target::SwapRefinement,
        Target::RankOneTranslation,
        Target::Character,
        Target::Subdivision,
        Target::SymplecticJoin,
        Target::Isotypical,
        Target::Suspension,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Building(BuildingKind::Gl) => "building-gl",
            Target::Building(BuildingKind::Sp) => "building-sp",
            Target::CoisotropicCorrespondence => "theorem-1-1",
            Target::SubspacePairs => "theorem-1-2",
            Target::Isotypical => "isotypical",
            Target::Character => "character",
            Target::Subdivision => "subdivision",
            Target::Suspension => "suspension",
            Target::PartitionFixed => "partition-fixed",
            Target::SwapRefinement => "example-2-3",
            Target::RankOneTranslation => "example-5-2",
            Target::SymplecticJoin => "join-cor-1-3",
        }
    }

    /// Whether the target depends on `k` (the others have a fixed or no `k`).
    pub fn uses_k(&self) -> bool {
        !matches!(self, Target::SwapRefinement | Target::RankOneTranslation | Target::SymplecticJoin)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = Target::VERIFY
            .into_iter()
            .chain([Target::Building(BuildingKind::Gl), Target::Building(BuildingKind::Sp)]);
        for t in all {
            if t.name() == s {
                return Ok(t);
            }
        }
        Err(format!("unknown target {s:?}"))
    }
}

/// Parameters of one verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Params {
    pub p: u32,
    pub k: usize,
    pub seed: u64,
}

/// Every isotypical decomposition for one `(p, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotypicalSuite {
    pub p: u32,
    pub k: usize,
    pub coisotropic_count: usize,
    /// Distinct `(dim W, component count, component dimension)` triples.
    pub shapes: Vec<(usize, usize, usize)>,
    pub failures: Vec<String>,
}

pub fn isotypical_suite(p: u32, k: usize) -> Result<IsotypicalSuite, VerifyError> {
    let group = HeisGroup::new(p, k)?;
    let ws = SymplecticSpace::new(p, k)?.proper_coisotropic_subspaces()?;
    let mut shapes = std::collections::BTreeMap::new();
    let mut failures = Vec::new();
    for w in &ws {
        match isotypical_components(&group, w) {
            Ok(data) => {
                let expected = (p as usize).pow((2 * k - w.dim()) as u32);
                if data.component_count != expected {
                    failures.push(format!("{w}: {} components, expected {expected}", data.component_count));
                }
                *shapes.entry((w.dim(), data.component_count, data.component_dim)).or_insert(0usize) += 1;
            }
            Err(RepError::Assertion(m)) => failures.push(m),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(IsotypicalSuite {
        p,
        k,
        coisotropic_count: ws.len(),
        shapes: shapes.into_keys().collect(),
        failures,
    })
}

/// Character values and group-law spot checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterCheck {
    pub character: CharacterReport,
    pub homomorphism_pairs: usize,
    pub homomorphism_failures: usize,
}

pub fn character_check(p: u32, k: usize, seed: u64) -> Result<CharacterCheck, VerifyError> {
    let character = gamma_character_check(p, k)?;
    let group = HeisGroup::new(p, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = check_homomorphism(&group, &mut rng, HOMOMORPHISM_PAIRS);
    Ok(CharacterCheck { character, homomorphism_pairs: HOMOMORPHISM_PAIRS, homomorphism_failures: failures })
}

/// Homology of one poset and of its edgewise subdivision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionCase {
    pub name: String,
    pub elements: usize,
    pub subdivision_elements: usize,
    pub homology: String,
    pub subdivision_homology: String,
    pub equal: bool,
    /// Whether `(x ≤ y) ↦ y` induces isomorphisms; `None` when the complexes
    /// are too large for the dense computation.
    pub projection_iso: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionReport {
    pub p: u32,
    pub k: usize,
    pub seed: u64,
    pub cases: Vec<SubdivisionCase>,
    pub random_posets: usize,
    pub failures: Vec<String>,
}

/// Compares the homology of a poset with that of its edgewise subdivision.
pub fn subdivision_case<L: Clone>(name: &str, poset: &FinPoset<L>) -> Result<SubdivisionCase, VerifyError> {
    let sd = poset.edgewise_subdivision();
    let h = homology(&poset.order_complex()?, true)?;
    let hs = homology(&sd.order_complex()?, true)?;
    // The subdivision lists intervals `(x ≤ y)` in lexicographic order of `(x, y)`.
    let top: Vec<usize> = (0..poset.len())
        .flat_map(|x| (0..poset.len()).filter(move |&y| poset.leq(x, y)))
        .collect();
    debug_assert_eq!(top.len(), sd.len());
    let map = PosetMap::new(&sd, poset, top)?;
    let projection_iso = match ChainMap::from_simplicial(&map.simplicial_map(&sd, poset)?, true).and_then(|c| induced_maps(&c)) {
        Ok(maps) => Some(maps.iter().all(|m| m.is_iso)),
        Err(HomologyError::Guard(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(SubdivisionCase {
        name: name.to_string(),
        elements: poset.len(),
        subdivision_elements: sd.len(),
        homology: h.summary(),
        subdivision_homology: hs.summary(),
        equal: h == hs,
        projection_iso,
    })
}

pub fn subdivision_check(p: u32, k: usize, seed: u64) -> Result<SubdivisionReport, VerifyError> {
    let mut cases = Vec::new();
    for kind in [BuildingKind::Gl, BuildingKind::Sp] {
        let b = building(kind, p, k)?;
        cases.push(subdivision_case(&format!("{kind}({p},{k})"), b.poset())?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..RANDOM_POSETS {
        let n = rng.gen_range(1..=8);
        let poset = random_poset(&mut rng, n, 0.35);
        let case = subdivision_case(&format!("random #{i} (n={n})"), &poset)?;
        if !case.equal || case.projection_iso == Some(false) {
            failures.push(format!("{}: {} vs {}", case.name, case.homology, case.subdivision_homology));
        }
    }
    for c in &cases {
        if !c.equal || c.projection_iso == Some(false) {
            failures.push(format!("{}: {} vs {}", c.name, c.homology, c.subdivision_homology));
        }
    }
    Ok(SubdivisionReport { p, k, seed, cases, random_posets: RANDOM_POSETS, failures })
}

/// The two-cone model of the suspension of `T(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuspensionReport {
    pub p: u32,
    pub k: usize,
    pub elements: usize,
    pub cone_plus: usize,
    pub cone_minus: usize,
    pub cones_cover: bool,
    pub intersection_is_subdivision: bool,
    pub mayer_vietoris_consistent: bool,
    pub suspension_homology: String,
    pub building_homology: String,
    /// `b̃_d(T^◇) = b̃_{d−1}(T(k))` for all `d`.
    pub betti_shifted: bool,
    pub failures: Vec<String>,
}

fn shifted(a: &HomologyReport, b: &HomologyReport) -> bool {
    let lo = a.groups.iter().chain(&b.groups).map(|g| g.degree).min().unwrap_or(0) - 1;
    let hi = a.groups.iter().chain(&b.groups).map(|g| g.degree).max().unwrap_or(0) + 1;
    (lo..=hi).all(|d| a.betti(d) == b.betti(d - 1))
}

pub fn suspension_check(p: u32, k: usize) -> Result<SuspensionReport, VerifyError> {
    let model = suspension_model(p, k)?;
    let td = model.tdiamond();
    let mut covered = vec![false; td.len()];
    for &i in model.cone_plus().iter().chain(model.cone_minus()) {
        covered[i] = true;
    }
    let cones_cover = covered.iter().all(|&c| c);
    let meet = model.intersection_is_subdivision();
    let mv = mayer_vietoris_check(&model.mayer_vietoris()?)?;
    let hs = homology(&td.order_complex()?, true)?;
    let hb = homology(&tits_gl(p, k)?.order_complex()?, true)?;
    let betti_shifted = shifted(&hs, &hb);
    let mut failures = Vec::new();
    if !cones_cover {
        failures.push("the cones do not cover T^◇".to_string());
    }
    if !meet {
        failures.push("cone intersection differs from the subdivision of T(k)".to_string());
    }
    if !mv.consistent {
        failures.push("Mayer-Vietoris ranks are inconsistent".to_string());
    }
    if !betti_shifted {
        failures.push(format!("{} is not the shift of {}", hs.summary(), hb.summary()));
    }
    Ok(SuspensionReport {
        p,
        k,
        elements: td.len(),
        cone_plus: model.cone_plus().len(),
        cone_minus: model.cone_minus().len(),
        cones_cover,
        intersection_is_subdivision: meet,
        mayer_vietoris_consistent: mv.consistent,
        suspension_homology: hs.summary(),
        building_homology: hb.summary(),
        betti_shifted,
        failures,
    })
}

/// Translation-invariant partitions against the Tits building.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionFixedReport {
    pub p: u32,
    pub k: usize,
    pub candidates: usize,
    pub fixed: usize,
    pub building_elements: usize,
    pub isomorphic_to_tits_gl: bool,
    /// The fixed partitions are exactly the coset partitions of proper nontrivial subspaces.
    pub coset_partitions: bool,
    pub homology: String,
    pub failures: Vec<String>,
}

pub fn partition_fixed_check(p: u32, k: usize) -> Result<PartitionFixedReport, VerifyError> {
    let fixed = partition_fixed_points(p, k)?;
    let gl = tits_gl(p, k)?;
    let iso = find_isomorphism(gl.poset(), &fixed.poset).is_some();
    let cosets: std::collections::BTreeSet<_> = gl.poset().labels().iter().map(coset_partition).collect();
    let found: std::collections::BTreeSet<_> = fixed.poset.labels().iter().cloned().collect();
    let coset_ok = cosets == found;
    let h = homology(&fixed.poset.order_complex()?, true)?;
    let mut failures = Vec::new();
    if !iso {
        failures.push("no isomorphism with the Tits building".to_string());
    }
    if !coset_ok {
        failures.push("fixed partitions differ from coset partitions".to_string());
    }
    Ok(PartitionFixedReport {
        p,
        k,
        candidates: fixed.candidates,
        fixed: fixed.poset.len(),
        building_elements: gl.len(),
        isomorphic_to_tits_gl: iso,
        coset_partitions: coset_ok,
        homology: h.summary(),
        failures,
    })
}

/// The join of `T(1)^◇` with `T_Sp(1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinCheck {
    pub join: JoinReport,
    pub expected_degree: i64,
    pub expected_rank: usize,
    pub failures: Vec<String>,
}

pub fn join_check(p: u32) -> Result<JoinCheck, VerifyError> {
    let (t, s) = (1, 1);
    let join = join_suspension_with_symplectic(p, t, s)?;
    let expected_degree = (s + t) as i64 - 1;
    let expected_rank = join.suspension_rank * join.symplectic_rank;
    let mut failures = Vec::new();
    if join.degree != Some(expected_degree) {
        failures.push(format!("homology {} is not concentrated in degree {expected_degree}", join.summary));
    }
    if join.rank != expected_rank {
        failures.push(format!("rank {} differs from {expected_rank}", join.rank));
    }
    Ok(JoinCheck { join, expected_degree, expected_rank, failures })
}

/// The report of any target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Details {
    Building(SphereCountReport),
    CoisotropicCorrespondence(CoisotropicCorrespondenceReport),
    SubspacePairs(SubspacePairReport),
    Isotypical(IsotypicalSuite),
    Character(CharacterCheck),
    Subdivision(SubdivisionReport),
    Suspension(SuspensionReport),
    PartitionFixed(PartitionFixedReport),
    SwapRefinement(SwapRefinementReport),
    RankOneTranslation(RankOneTranslationReport),
    Join(JoinCheck),
}

/// Result of running one target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub target: String,
    pub p: u32,
    pub k: Option<usize>,
    pub passed: bool,
    pub summary: String,
    pub failures: Vec<String>,
    pub details: Details,
}

impl Outcome {
    fn new(target: Target, params: Params, details: Details) -> Self {
        let (passed, summary, failures) = judge(&details);
        let k = target.uses_k().then_some(params.k);
        let p = if target == Target::SwapRefinement { 2 } else { params.p };
        Outcome { target: target.name().to_string(), p, k, passed, summary, failures, details }
    }
}

fn judge(details: &Details) -> (bool, String, Vec<String>) {
    match details {
        Details::Building(r) => {
            let summary = if r.elements == 0 {
                "empty".to_string()
            } else {
                format!("{} elements, {}", r.elements, r.summary)
            };
            (true, summary, Vec::new())
        }
        Details::CoisotropicCorrespondence(r) => (
            r.passed(),
            format!(
                "{} fixed points for {} coisotropic subspaces{}",
                r.fixed_decompositions,
                r.coisotropic_count,
                r.homology.as_ref().map(|h| format!(", {h}")).unwrap_or_default()
            ),
            r.failures.clone(),
        ),
        Details::SubspacePairs(r) => {
            let iso: Vec<String> =
                r.induced.iter().filter(|m| m.rank > 0).map(|m| format!("H̃_{} rank {} iso={}", m.degree, m.rank, m.is_iso)).collect();
            (
                r.passed(),
                format!("{} pairs, {}; {}", r.tdiamond_size, r.subdivision_homology, if iso.is_empty() { "no nonzero free homology".to_string() } else { iso.join(", ") }),
                r.failures.clone(),
            )
        }
        Details::Isotypical(r) => (
            r.failures.is_empty(),
            format!("{} coisotropic subspaces, shapes {:?}", r.coisotropic_count, r.shapes),
            r.failures.clone(),
        ),
        Details::Character(r) => {
            let mut failures = r.character.failures.clone();
            if r.homomorphism_failures > 0 {
                failures.push(format!("{} of {} random products are not multiplicative", r.homomorphism_failures, r.homomorphism_pairs));
            }
            (
                failures.is_empty(),
                format!(
                    "{} elements, {} noncentral traceless, {} commutator pairs",
                    r.character.elements_checked, r.character.noncentral_traceless, r.character.commutator_pairs_checked
                ),
                failures,
            )
        }
        Details::Subdivision(r) => (
            r.failures.is_empty(),
            format!("{} buildings and {} random posets", r.cases.len(), r.random_posets),
            r.failures.clone(),
        ),
        Details::Suspension(r) => (
            r.failures.is_empty(),
            format!("{} pairs, {} over {}", r.elements, r.suspension_homology, r.building_homology),
            r.failures.clone(),
        ),
        Details::PartitionFixed(r) => (
            r.failures.is_empty(),
            format!("{} of {} partitions fixed, {}", r.fixed, r.candidates, r.homology),
            r.failures.clone(),
        ),
        Details::SwapRefinement(r) => {
            let failures = if r.matches { Vec::new() } else { vec![format!("got {}, expected {}", r.refined, r.expected)] };
            (r.matches, r.refined.clone(), failures)
        }
        Details::RankOneTranslation(r) => (
            r.passed(),
            format!(
                "{} trivial-action decompositions ({}), {} free-action in {} isotropy class(es)",
                r.trivial_action_count,
                r.trivial_action_homology,
                r.free_action.len(),
                r.free_isotropy_classes
            ),
            r.failures.clone(),
        ),
        Details::Join(r) => (r.failures.is_empty(), r.join.summary.clone(), r.failures.clone()),
    }
}

/// Runs one target.
pub fn run(target: Target, params: Params) -> Result<Outcome, VerifyError> {
    let Params { p, k, seed } = params;
    let details = match target {
        Target::Building(kind) => Details::Building(building(kind, p, k)?.sphere_count_report()?),
        Target::CoisotropicCorrespondence => Details::CoisotropicCorrespondence(verify_coisotropic_correspondence(p, k, true)?),
        Target::SubspacePairs => Details::SubspacePairs(verify_subspace_pair_retraction(p, k)?),
        Target::Isotypical => Details::Isotypical(isotypical_suite(p, k)?),
        Target::Character => Details::Character(character_check(p, k, seed)?),
        Target::Subdivision => Details::Subdivision(subdivision_check(p, k, seed)?),
        Target::Suspension => Details::Suspension(suspension_check(p, k)?),
        Target::PartitionFixed => Details::PartitionFixed(partition_fixed_check(p, k)?),
        Target::SwapRefinement => Details::SwapRefinement(verify_swap_refinement()?),
        Target::RankOneTranslation => Details::RankOneTranslation(verify_rank_one_translation_fixed(p)?),
        Target::SymplecticJoin => Details::Join(join_check(p)?),
    };
    Ok(Outcome::new(target, params, details))
}

/// One entry of the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SuiteEntry {
    /// Acceptance criterion the entry belongs to.
    pub criterion: u32,
    #[serde(serialize_with = "serialize_target")]
    pub target: Target,
    pub p: u32,
    pub k: usize,
    /// Excluded unless slow entries are requested.
    pub slow: bool,
}

fn serialize_target<S: serde::Serializer>(t: &Target, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(t.name())
}

/// Selection of suite entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub slow: bool,
    pub max_p: Option<u32>,
    pub max_k: Option<usize>,
}

const CORPUS: [(u32, usize); 6] = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)];

fn is_slow(p: u32, k: usize) -> bool {
    (p as usize).pow(k as u32) > 4
}

/// The acceptance matrix, in criterion order.
pub fn suite_entries(config: SuiteConfig) -> Vec<SuiteEntry> {
    use BuildingKind::{Gl, Sp};
    let e = |criterion, target, p, k, slow| SuiteEntry { criterion, target, p, k, slow };
    let mut out = Vec::new();
    for p in [2, 3, 5] {
        out.push(e(1, Target::Building(Sp), p, 1, false));
    }
    for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)] {
        out.push(e(2, Target::CoisotropicCorrespondence, p, k, is_slow(p, k)));
    }
    for (p, k) in CORPUS {
        out.push(e(3, Target::Isotypical, p, k, is_slow(p, k)));
    }
    for (p, k) in CORPUS {
        out.push(e(4, Target::Character, p, k, false));
    }
    for (kind, p, k) in [(Gl, 2, 2), (Gl, 2, 3), (Gl, 3, 2), (Sp, 2, 2)] {
        out.push(e(5, Target::Building(kind), p, k, false));
    }
    for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)] {
        out.push(e(6, Target::SubspacePairs, p, k, false));
    }
    for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)] {
        out.push(e(7, Target::Subdivision, p, k, false));
    }
    for (p, k) in [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)] {
        out.push(e(8, Target::Suspension, p, k, false));
    }
    for (p, k) in [(2, 1), (2, 2), (2, 3)] {
        out.push(e(9, Target::PartitionFixed, p, k, false));
    }
    out.push(e(10, Target::SwapRefinement, 2, 2, false));
    for p in [2, 3, 5] {
        out.push(e(11, Target::RankOneTranslation, p, 1, false));
    }
    for p in [2, 3] {
        out.push(e(12, Target::SymplecticJoin, p, 1, false));
    }
    out.retain(|x| {
        (config.slow || !x.slow)
            && config.max_p.is_none_or(|m| x.p <= m)
            && config.max_k.is_none_or(|m| !x.target.uses_k() || x.k <= m)
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in Target::VERIFY {
            assert_eq!(t.name().parse::<Target>().unwrap(), t);
        }
        assert!("theorem-9".parse::<Target>().is_err());
    }

    #[test]
    fn guard_errors_are_classified() {
        let e: VerifyError = RepError::Building(BuildingError::Guard(GuardError { what: "x", size: 2, limit: 1 })).into();
        assert!(matches!(e, VerifyError::Guard(_)));
        let e: VerifyError = RepError::NotPrime(4).into();
        assert!(matches!(e, VerifyError::Invalid(_)));
    }

    #[test]
    fn suite_filters() {
        let all = suite_entries(SuiteConfig { slow: true, max_p: None, max_k: None });
        let fast = suite_entries(SuiteConfig { slow: false, max_p: None, max_k: None });
        assert!(fast.len() < all.len());
        let k1 = suite_entries(SuiteConfig { slow: false, max_p: None, max_k: Some(1) });
        assert!(k1.iter().all(|e| e.k == 1 || !e.target.uses_k()));
        assert!((1..=12).all(|c| all.iter().any(|e| e.criterion == c)));
    }

    #[test]
    fn small_targets_pass() {
        let params = Params { p: 2, k: 2, seed: 1 };
        for t in [Target::SwapRefinement, Target::Suspension, Target::PartitionFixed, Target::SubspacePairs] {
            let o = run(t, params).unwrap();
            assert!(o.passed, "{t}: {:?}", o.failures);
        }
        let o = run(Target::Building(BuildingKind::Gl), Params { p: 2, k: 1, seed: 0 }).unwrap();
        assert_eq!(o.summary, "empty");
    }
}
