//! Fixed-width text rendering.

use std::fmt::Write;

use crate::dto::*;

fn cls(c: &Class) -> String {
    format!("({},{},{})", c[0], c[1], c[2])
}

fn gram(g: &k3moduli::k3::Gram) -> String {
    format!("[{} {}; {} {}]", g[0][0], g[0][1], g[1][0], g[1][1])
}

fn list(v: &[Class]) -> String {
    v.iter().map(cls).collect::<Vec<_>>().join(" ")
}

fn poly(coeffs: &[String]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c == "0" {
            continue;
        }
        let x = match k {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        };
        let coef = match (c.as_str(), k) {
            ("1", k) if k > 0 => String::new(),
            ("-1", k) if k > 0 => "-".to_string(),
            (c, 0) => c.to_string(),
            (c, _) => format!("{c}*"),
        };
        terms.push(format!("{coef}{x}"));
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

fn row(out: &mut String, label: &str, value: impl std::fmt::Display) {
    writeln!(out, "{label:<22}{value}").unwrap();
}

fn warnings(out: &mut String, w: &[String]) {
    for x in w {
        row(out, "warning", x);
    }
}

pub fn analyze(r: &AnalyzeResult, w: &[String]) -> String {
    let mut s = String::new();
    let (l, m) = (&r.lattice, &r.moduli);
    row(&mut s, "lattice", gram(&l.gram));
    row(&mut s, "m", l.m);
    row(&mut s, "disc", l.disc);
    row(&mut s, "disc0", m.disc0);
    row(&mut s, "primitive class", cls(&m.class));
    row(&mut s, "d_K", m.d_k);
    row(&mut s, "h", m.h);
    row(&mut s, "g", m.g);
    row(&mut s, "[M_K:K]", m.degree_mk_over_k);
    row(&mut s, "[M_Q:Q]", m.degree_mq_over_q);
    row(&mut s, "M_Q Galois", m.mq_is_galois);
    row(&mut s, "orbit", l.orbit.iter().map(gram).collect::<Vec<_>>().join(" "));
    row(&mut s, "class polynomial", poly(&m.class_polynomial));
    let mk: Vec<String> = m
        .mk_min_poly
        .coefficients
        .iter()
        .map(|c| if c.v == "0" { c.u.clone() } else { format!("({} + {}*sqrt({}))", c.u, c.v, m.d_k) })
        .collect();
    row(&mut s, "M_K polynomial", poly(&mk));
    row(&mut s, "M_K resolvent", &m.mk_min_poly.resolvent);
    row(&mut s, "M_Q polynomial", poly(&m.mq_min_poly.coefficients));
    row(&mut s, "M_Q generator", &m.mq_min_poly.generator);
    row(&mut s, "digits", m.precision_used);
    warnings(&mut s, w);
    s
}

pub fn classgroup(r: &ClassGroupResult, _: &[String]) -> String {
    let mut s = String::new();
    row(&mut s, "disc", r.disc);
    row(&mut s, "h", r.h);
    let divs: Vec<_> = r.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect();
    row(&mut s, "structure", if divs.is_empty() { "trivial".to_string() } else { divs.join(" x ") });
    row(&mut s, "classes", list(&r.classes));
    row(&mut s, "2-torsion", list(&r.two_torsion));
    row(&mut s, "principal genus", list(&r.principal_genus));
    row(&mut s, "genus order", r.genus_order);
    row(&mut s, "genera", r.genus_count);
    for (i, g) in r.genera.iter().enumerate() {
        row(&mut s, &format!("  genus {i}"), list(g));
    }
    s
}

pub fn orbit(r: &OrbitResult, _: &[String]) -> String {
    let mut s = String::new();
    row(&mut s, "lattice", gram(&r.gram));
    row(&mut s, "m", r.m);
    row(&mut s, "disc", r.disc);
    row(&mut s, "disc0", r.disc0);
    row(&mut s, "orbit size", r.orbit.len());
    for o in &r.orbit {
        row(
            &mut s,
            &format!("  {}", gram(&o.gram)),
            format!("class {}  conjugate {}", cls(&o.class), gram(&o.complex_conjugate)),
        );
    }
    s
}

pub fn classpoly(r: &ClassPolyResult, _: &[String]) -> String {
    let mut s = String::new();
    row(&mut s, "disc", r.disc);
    row(&mut s, "degree", r.degree);
    row(&mut s, "polynomial", poly(&r.coefficients));
    row(&mut s, "digits", r.digits);
    s
}

pub fn enumerate(r: &EnumerateResult, _: &[String]) -> String {
    let mut s = String::new();
    writeln!(s, "{:>8} {:>5} {:>7} {:>5}  imprimitive (m, disc0, h0, g0)", "disc", "h", "genera", "g").unwrap();
    for x in &r.strata {
        let fam: Vec<_> = x.imprimitive.iter().map(|f| format!("({}, {}, {}, {})", f.m, f.disc0, f.h0, f.g0)).collect();
        writeln!(s, "{:>8} {:>5} {:>7} {:>5}  {}", x.disc, x.h, x.genus_count, x.g, fam.join(" ")).unwrap();
    }
    row(&mut s, "count", r.count);
    s
}
