//! Serializable views of library results. Field order here is the key order
//! in the emitted JSON.

use k3moduli::classgroup::{ClassGroup, ClassSet};
use k3moduli::k3::{Gram, TranscLattice};
use k3moduli::moduli::{IntPolynomial, KCoeff, KPolynomial, ModuliReport, QPolynomial};
use k3moduli::qforms::FormClass;
use serde::Serialize;

#[derive(Serialize)]
pub struct Envelope<I: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub input: I,
    pub result: R,
    pub warnings: Vec<String>,
}

pub type Class = [i64; 3];

pub fn class(c: &FormClass) -> Class {
    let q = c.rep();
    [q.a, q.b, q.c]
}

fn classes(group: &ClassGroup, set: &ClassSet) -> Vec<Class> {
    set.iter().map(|&i| class(group.class(i))).collect()
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[derive(Serialize)]
pub struct GramInput {
    pub gram: Gram,
    pub digits: Option<u32>,
}

#[derive(Serialize)]
pub struct DiscInput {
    pub disc: i64,
    pub digits: Option<u32>,
}

#[derive(Serialize)]
pub struct ClassGroupInput {
    pub disc: i64,
}

#[derive(Serialize)]
pub struct OrbitInput {
    pub gram: Gram,
}

#[derive(Serialize)]
pub struct EnumerateInput {
    pub max_disc: u64,
    pub max_h: Option<usize>,
    pub primitive_only: bool,
}

#[derive(Serialize)]
pub struct ClassGroupResult {
    pub disc: i64,
    pub h: usize,
    pub elementary_divisors: Vec<u64>,
    pub classes: Vec<Class>,
    pub two_torsion: Vec<Class>,
    pub principal_genus: Vec<Class>,
    pub genus_order: usize,
    pub genus_count: usize,
    pub genera: Vec<Vec<Class>>,
}

impl ClassGroupResult {
    pub fn new(group: &ClassGroup) -> Self {
        let genera = group.genus_partition();
        ClassGroupResult {
            disc: group.disc(),
            h: group.order(),
            elementary_divisors: group.elementary_divisors().to_vec(),
            classes: group.classes().iter().map(class).collect(),
            two_torsion: classes(group, &group.two_torsion()),
            principal_genus: classes(group, &genera.principal_genus),
            genus_order: genera.principal_genus.len(),
            genus_count: genera.cosets.len(),
            genera: genera.cosets.iter().map(|c| classes(group, c)).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct OrbitMember {
    pub gram: Gram,
    pub class: Class,
    pub complex_conjugate: Gram,
}

impl OrbitMember {
    pub fn new(t: &TranscLattice) -> Self {
        OrbitMember { gram: t.gram(), class: class(&t.q0()), complex_conjugate: t.complex_conjugate().gram() }
    }
}

#[derive(Serialize)]
pub struct OrbitResult {
    pub gram: Gram,
    pub m: i64,
    pub disc: i64,
    pub disc0: i64,
    pub class: Class,
    pub orbit: Vec<OrbitMember>,
}

impl OrbitResult {
    pub fn new(t: &TranscLattice, orbit: &[TranscLattice]) -> Self {
        OrbitResult {
            gram: t.gram(),
            m: t.m(),
            disc: t.disc(),
            disc0: t.disc0(),
            class: class(&t.q0()),
            orbit: orbit.iter().map(OrbitMember::new).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct ClassPolyResult {
    pub disc: i64,
    pub degree: usize,
    pub coefficients: Vec<String>,
    pub digits: u32,
}

impl ClassPolyResult {
    pub fn new(disc: i64, p: &IntPolynomial) -> Self {
        ClassPolyResult { disc, degree: p.degree(), coefficients: strings(&p.coeffs), digits: p.digits }
    }
}

#[derive(Serialize)]
pub struct KCoeffDto {
    pub u: String,
    pub v: String,
}

impl KCoeffDto {
    fn new(c: &KCoeff) -> Self {
        KCoeffDto { u: c.u_string(), v: c.v_string() }
    }
}

#[derive(Serialize)]
pub struct KPolyDto {
    pub d_k: i64,
    pub degree: usize,
    pub coefficients: Vec<KCoeffDto>,
    pub resolvent: String,
}

impl KPolyDto {
    fn new(p: &KPolynomial) -> Self {
        KPolyDto {
            d_k: p.d_k,
            degree: p.degree(),
            coefficients: p.coeffs.iter().map(KCoeffDto::new).collect(),
            resolvent: p.resolvent.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct QPolyDto {
    pub degree: usize,
    pub coefficients: Vec<String>,
    pub resolvent: String,
    pub generator: String,
}

impl QPolyDto {
    fn new(p: &QPolynomial) -> Self {
        QPolyDto {
            degree: p.poly.degree(),
            coefficients: strings(&p.poly.coeffs),
            resolvent: p.resolvent.to_string(),
            generator: p.generator.to_string(),
        }
    }
}

/// Data that changes under `T ↦ n·T`.
#[derive(Serialize)]
pub struct LatticeDto {
    pub gram: Gram,
    pub m: i64,
    pub disc: i64,
    pub orbit: Vec<Gram>,
}

/// Data that is invariant under `T ↦ n·T`.
#[derive(Serialize)]
pub struct ModuliDto {
    pub disc0: i64,
    pub class: Class,
    pub d_k: i64,
    pub h: usize,
    pub g: usize,
    pub degree_mk_over_k: usize,
    pub degree_mq_over_q: usize,
    pub mq_is_galois: bool,
    pub class_polynomial: Vec<String>,
    pub mk_min_poly: KPolyDto,
    pub mq_min_poly: QPolyDto,
    pub precision_used: u32,
}

#[derive(Serialize)]
pub struct AnalyzeResult {
    pub lattice: LatticeDto,
    pub moduli: ModuliDto,
}

impl AnalyzeResult {
    pub fn new(r: &ModuliReport) -> Self {
        AnalyzeResult {
            lattice: LatticeDto {
                gram: r.lattice.gram(),
                m: r.m,
                disc: r.disc,
                orbit: r.orbit.iter().map(|t| t.gram()).collect(),
            },
            moduli: ModuliDto {
                disc0: r.disc0,
                class: class(&r.lattice.q0()),
                d_k: r.d_k,
                h: r.h,
                g: r.g,
                degree_mk_over_k: r.degree_mk_over_k,
                degree_mq_over_q: r.degree_mq_over_q,
                mq_is_galois: r.mq_is_galois,
                class_polynomial: strings(&r.class_polynomial.coeffs),
                mk_min_poly: KPolyDto::new(&r.mk_min_poly),
                mq_min_poly: QPolyDto::new(&r.mq_min_poly),
                precision_used: r.precision_used,
            },
        }
    }
}

/// Lattices `m·q₀` of discriminant `m²·disc0` with `m > 1`.
#[derive(Serialize)]
pub struct Family {
    pub m: i64,
    pub disc0: i64,
    pub h0: usize,
    pub g0: usize,
}

#[derive(Serialize)]
pub struct Stratum {
    pub disc: i64,
    pub h: usize,
    pub genus_count: usize,
    pub g: usize,
    pub imprimitive: Vec<Family>,
}

#[derive(Serialize)]
pub struct EnumerateResult {
    pub count: usize,
    pub strata: Vec<Stratum>,
}
