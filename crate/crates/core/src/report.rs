//! Command dispatch and report records. Reports are built from ordered maps
//! and sorted lists only, so equal inputs give byte-equal output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bernstein::InertialClass;
use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::extquot::GammaSet;
use crate::geomequiv::{
    a_weight_chain, check_spectrum_preserving, corner_skeleton, crossed_product_skeleton, label_pairing,
    morita_linking_check, FilteredMorphism,
};
use crate::groups::{Cocycle, ProjectiveRep};
use crate::klparam::{
    a_weight, affine_to_kl, is_tempered, kl_to_affine, param_is_tempered, stab_action, StabElement, TEMPERED_CONVENTION,
};
use crate::oracles::{oracle_crossed_spectrum, CROSSED_BOUND};
use crate::packets::{diagram_check, enumerate_params_component, enumerate_params_g, sharp_packet_counts, ParamSet};
use crate::scenario::{Scenario, SCHEMA_VERSION};
use crate::springer::{a_value, SPRINGER_CONVENTION};
use crate::torus::Coord;

pub const ORDERING_CONVENTION: &str =
    "points in lexicographic order of canonical coordinates; [x, rho] by least representative; packets by least member";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Enumerate,
    Quotient,
    Packets,
    Kl,
    Diagram,
    Geomequiv,
    VerifyAll,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Enumerate,
        Command::Quotient,
        Command::Packets,
        Command::Kl,
        Command::Diagram,
        Command::Geomequiv,
        Command::VerifyAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Quotient => "quotient",
            Command::Packets => "packets",
            Command::Kl => "kl",
            Command::Diagram => "diagram",
            Command::Geomequiv => "geomequiv",
            Command::VerifyAll => "verify-all",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Conventions {
    pub springer: &'static str,
    pub tempered: &'static str,
    pub ordering: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub sample: Value,
    pub conventions: Conventions,
    pub sections: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} on {} (schema {})", self.command, self.scenario, self.schema_version);
        let _ = writeln!(out, "springer: {}", self.conventions.springer);
        let _ = writeln!(out, "tempered: {}", self.conventions.tempered);
        let _ = writeln!(out, "ordering: {}", self.conventions.ordering);
        for (name, v) in &self.sections {
            let _ = writeln!(out, "\n[{name}]");
            if let Value::Object(m) = v {
                for (k, x) in m {
                    let _ = writeln!(out, "  {k:<28} {}", compact(x));
                }
            }
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let _ = writeln!(out, "\n{:<4}  {:<w$}  detail", "", "check");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<4}  {:<w$}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            out,
            "\n{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if self.passed { "PASS" } else { "FAIL" }
        );
        out
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 100 {
        format!("{}…", &s[..s.char_indices().take_while(|(i, _)| *i < 97).last().map_or(0, |(i, c)| i + c.len_utf8())])
    } else {
        s
    }
}

type Section = (Value, Vec<Check>);

pub fn run(cmd: Command, sc: &Scenario) -> Result<Report> {
    let mut sections = BTreeMap::new();
    let mut checks = Vec::new();
    let wanted: Vec<Command> = if cmd == Command::VerifyAll {
        Command::ALL[..6].to_vec()
    } else {
        vec![cmd]
    };
    for c in wanted {
        let (v, ch) = match c {
            Command::Enumerate => enumerate_section(sc)?,
            Command::Quotient => quotient_section(sc)?,
            Command::Packets => packets_section(sc)?,
            Command::Kl => kl_section(sc)?,
            Command::Diagram => diagram_section(sc)?,
            Command::Geomequiv => geomequiv_section(sc)?,
            Command::VerifyAll => unreachable!(),
        };
        sections.insert(c.name().to_string(), v);
        checks.extend(ch);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: cmd.name().to_string(),
        scenario: sc.name.clone(),
        sample: json!({
            "angle_denominator": sc.sample.angle_denominator,
            "radial_grid": sc.sample.radial_grid.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "points": sc.points().len(),
        }),
        conventions: Conventions {
            springer: SPRINGER_CONVENTION,
            tempered: TEMPERED_CONVENTION,
            ordering: ORDERING_CONVENTION,
        },
        sections,
        checks,
        passed,
    })
}

fn enumerate_section(sc: &Scenario) -> Result<Section> {
    let s = &sc.class;
    let tower = s.stabilizer_tower()?;
    let levi = s.levi_components()?;
    let comps = s.enumerate_subordinate()?;
    let mut checks: Vec<Check> = tower
        .checks
        .iter()
        .map(|(n, ok)| check(&format!("bernstein: {n}"), *ok, ""))
        .collect();
    let orbit_total: usize = comps.iter().map(|c| c.levi_orbits.len()).sum();
    checks.push(check(
        "bernstein: components partition the Levi components",
        orbit_total == levi.len(),
        format!("{orbit_total} Levi components over {} components, {} in all", comps.len(), levi.len()),
    ));
    let comp_json: Vec<Value> = comps
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "rho0": c.rho0_label,
                "rho0_dim": c.rho0_dim,
                "levi_components": c.levi_orbits.len(),
                "xl_sigma": c.xl_sigma.len(),
                "xg_sigma": c.xg_sigma.len(),
                "r_t": c.r_t.len(),
                "w_t": c.w_t.order(),
                "cocycle_trivial": c.cocycle.is_trivial(),
            })
        })
        .collect();
    let v = json!({
        "rank": s.rank,
        "blocks": s.spec.blocks.iter().map(|b| json!({"m": b.m, "e": b.e})).collect::<Vec<_>>(),
        "w_s": tower.w_s,
        "w_s_sharp": tower.w_s_sharp,
        "r_s_sharp": tower.r_s_sharp,
        "xg": s.xg.order(),
        "xl_s": s.xl_s.len(),
        "xl_omega": s.xl_omega.len(),
        "vmu": s.vmu.len(),
        "stab": tower.stab,
        "stab_plus": tower.stab_plus,
        "kappa_trivial": s.kappa.is_trivial(),
        "unramified_diagonal": s.diagonal,
        "omega_irreps": s.omega_irreps().iter().map(|r| format!("{} (dim {})", r.label, r.dim)).collect::<Vec<_>>(),
        "levi_components": levi.iter().map(|l| l.labels.join(",")).collect::<Vec<_>>(),
        "components": comp_json,
    });
    Ok((v, checks))
}

fn oracle_check(name: &str, x: &GammaSet) -> Result<Option<Check>> {
    if x.len() * x.group().order() > CROSSED_BOUND {
        return Ok(None);
    }
    let mut mine = x.crossed_product_spectrum()?;
    mine.sort_unstable();
    let cocycle = x.global_cocycle().filter(|c| !c.is_trivial());
    let f = cocycle.map(|c| move |a: usize, b: usize| c.get(a, b));
    let o = oracle_crossed_spectrum(
        x.group(),
        x.len(),
        &|g, p| x.act(g, p),
        f.as_ref().map(|f| f as &dyn Fn(usize, usize) -> RootOfUnity),
    )?;
    let mut detail = format!("{} modules", mine.len());
    let mut ok = mine == o.value;
    if cocycle.is_none() {
        let sq: u64 = mine.iter().map(|d| d * d).sum();
        ok &= sq == x.algebra_dimension();
        let _ = write!(detail, ", sum of squares {sq} = {}", x.algebra_dimension());
    }
    Ok(Some(check(&format!("extquot: {name} spectrum matches the groupoid oracle"), ok, detail)))
}

fn quotient_section(sc: &Scenario) -> Result<Section> {
    let s = &sc.class;
    let pts = sc.points();
    let ws = s.w_s_set(&pts, None)?;
    let eq = ws.extended_quotient()?;
    let mut sets: Vec<(String, GammaSet)> = vec![
        ("T_s // W_s".into(), ws.clone()),
        ("T_s // X^L(s)".into(), s.xl_s_set(&pts, false)?),
        ("T_s/D // Stab(s)".into(), s.stab_set(&pts)?),
    ];
    let comps = s.enumerate_subordinate()?;
    for c in &comps {
        sets.push((format!("component {}", c.index), s.component_set(c, &pts)?));
    }
    let mut checks = Vec::new();
    let mut sizes = BTreeMap::new();
    for (name, x) in &sets {
        sizes.insert(name.clone(), json!({"points": x.len(), "group": x.group().order(), "quotient": x.extended_quotient()?.len()}));
        match oracle_check(name, x)? {
            Some(c) => checks.push(c),
            None => checks.push(check(
                &format!("extquot: {name} spectrum matches the groupoid oracle"),
                true,
                format!("skipped: |X|·|Γ| above {CROSSED_BOUND}"),
            )),
        }
        let direct = x.orbit_irrep_count()?;
        let n = x.extended_quotient()?.len();
        checks.push(check(
            &format!("extquot: {name} orbit count equals Σ |Irr C[Γ_x, ♮]|"),
            n == direct,
            format!("{n} = {direct}"),
        ));
    }
    let v = json!({
        "sets": sizes,
        "t_s_w_s": eq.iter().map(|p| json!({"point": p.point_label, "rho": p.rho_label, "induced_dim": p.induced_dim()})).collect::<Vec<_>>(),
    });
    Ok((v, checks))
}

fn packet_json(set: &ParamSet, classes: &[Vec<usize>]) -> Vec<Value> {
    classes
        .iter()
        .map(|cl| {
            Value::Array(
                cl.iter()
                    .map(|&i| json!(format!("{} {}", set.points[i].base, set.points[i].rho_label)))
                    .collect(),
            )
        })
        .collect()
}

fn histogram(sizes: &[usize]) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for &k in sizes {
        *h.entry(k.to_string()).or_default() += 1;
    }
    h
}

fn packets_section(sc: &Scenario) -> Result<Section> {
    let s = &sc.class;
    let pts = sc.points();
    let g = enumerate_params_g(s, &pts, false)?;
    let gp = g.packet_partition()?;
    let mut checks = vec![
        check(
            "packets: same_packet is an equivalence on the G side",
            gp.equivalence_checked,
            format!("{} parameters", g.points.len()),
        ),
        check(
            "packets: G-side packets are singletons",
            gp.sizes().iter().all(|&k| k == 1),
            format!("{} packets", gp.classes.len()),
        ),
    ];
    let counts = sharp_packet_counts(s, &pts)?;
    let mut comps = Vec::new();
    for c in s.enumerate_subordinate()? {
        let set = enumerate_params_component(s, &c, &pts)?;
        let part = set.packet_partition()?;
        checks.push(check(
            &format!("packets: same_packet is an equivalence on component {}", c.index),
            part.equivalence_checked,
            format!("{} parameters", set.points.len()),
        ));
        let cnt = counts.iter().find(|k| k.component == c.index);
        if let Some(k) = cnt {
            checks.push(check(
                &format!("packets: component {} packets match Stab(s)-orbits of G parameters", c.index),
                k.count_agrees,
                format!("{} packets, {} orbits", k.packet_sizes.len(), k.stab_orbits_of_g_params),
            ));
        }
        let nontrivial: Vec<Vec<usize>> = part.classes.iter().filter(|cl| cl.len() > 1).cloned().collect();
        comps.push(json!({
            "component": c.index,
            "parameters": set.points.len(),
            "packets": part.classes.len(),
            "size_histogram": histogram(&part.sizes()),
            "nonsingleton_packets": packet_json(&set, &nontrivial),
        }));
    }
    let v = json!({
        "g_parameters": g.points.len(),
        "g_size_histogram": histogram(&gp.sizes()),
        "components": comps,
    });
    Ok((v, checks))
}

/// Generators of `Stab(s)^+` lifted from `X^G(s)`, and the unitary step of
/// the unramified diagonal, as operations on multisegments.
pub fn kl_stab_elements(s: &InertialClass, den: u32) -> Vec<StabElement> {
    let nb = s.blocks.len();
    let mut out: Vec<StabElement> = s
        .xg
        .generators()
        .iter()
        .map(|&g| StabElement {
            label: s.xg.label(g).to_string(),
            block_perm: s.xg_block_perm[g].clone(),
            shift: s.blocks.iter().map(|b| s.chi[g].0[b[0]]).collect(),
        })
        .collect();
    if let Some(w) = &s.diagonal {
        out.push(StabElement {
            label: format!("diagonal e(1/{den})"),
            block_perm: (0..nb).collect(),
            shift: s
                .blocks
                .iter()
                .map(|b| Coord::unitary(RootOfUnity::from_fraction(w[b[0]], den as i64)))
                .collect(),
        });
    }
    out
}

fn kl_section(sc: &Scenario) -> Result<Section> {
    let s = &sc.class;
    let g = enumerate_params_g(s, &sc.points(), false)?;
    let gens = kl_stab_elements(s, sc.sample.angle_denominator);
    let mut rows = Vec::new();
    let (mut round, mut temp, mut a_ok, mut inv) = (0usize, 0usize, 0usize, 0usize);
    let mut first_bad: Option<String> = None;
    for p in &g.points {
        let ms = p.multisegment(&s.blocks)?;
        let ap = kl_to_affine(&ms);
        let back = affine_to_kl(&ap);
        let aw = a_weight(&ms);
        round += usize::from(back == ms);
        temp += usize::from(is_tempered(&ms) == p.tempered && param_is_tempered(&ap) == p.tempered);
        a_ok += usize::from(aw == a_value(&p.springer_class));
        let mut stable = true;
        for e in &gens {
            let moved = stab_action(&ms, e)?;
            if a_weight(&moved) != aw || is_tempered(&moved) != is_tempered(&ms) {
                stable = false;
                first_bad.get_or_insert_with(|| format!("{ms} under {}", e.label));
            }
        }
        inv += usize::from(stable);
        rows.push(json!({
            "multisegment": ms.to_string(),
            "t": ap.t().to_string(),
            "u": ap.u().to_string(),
            "rho": ap.rho(),
            "a_weight": aw,
            "tempered": p.tempered,
        }));
    }
    let n = g.points.len();
    let checks = vec![
        check("klparam: KL to affine Springer round trip", round == n, format!("{round}/{n}")),
        check("klparam: temperedness agrees on both sides", temp == n, format!("{temp}/{n}")),
        check("klparam: a-weight equals the Springer a-value", a_ok == n, format!("{a_ok}/{n}")),
        check(
            "klparam: a-weight and temperedness are Stab(s)^+ invariant",
            inv == n,
            first_bad.unwrap_or_else(|| format!("{n} parameters, {} generators", gens.len())),
        ),
    ];
    Ok((json!({ "stab_generators": gens.iter().map(|e| e.label.clone()).collect::<Vec<_>>(), "parameters": rows }), checks))
}

fn diagram_section(sc: &Scenario) -> Result<Section> {
    let d = diagram_check(&sc.class, &sc.points())?;
    let checks = d
        .rows
        .iter()
        .map(|r| check(&format!("packets: diagram row {}", r.row), r.agrees, format!("{} vs {}: {}", r.lhs, r.rhs, r.detail)))
        .collect();
    let v = json!({
        "sample_size": d.sample_size,
        "rows": d.rows,
        "failing_rows": d.failing_rows(),
    });
    Ok((v, checks))
}

fn geomequiv_section(sc: &Scenario) -> Result<Section> {
    let s = &sc.class;
    let pts = sc.points();
    let chain = a_weight_chain(s, &pts)?;
    let mut checks = vec![check(
        "geomequiv: a-weight chain is spectrum preserving and certificates compose",
        chain.agrees,
        format!("{} steps, {} levels", chain.steps.len(), chain.levels),
    )];
    let ws = s.w_s_set(&pts, None)?;
    let cp = crossed_product_skeleton(&ws)?;
    let mu = ProjectiveRep::regular(&Cocycle::trivial(ws.group().clone()));
    let corner = corner_skeleton(&ws, &mu)?;
    let m = morita_linking_check(&cp, &corner, &label_pairing(&cp, &corner))?;
    checks.push(check(
        "geomequiv: crossed product and its full corner are Morita linked",
        m.equivalent,
        m.reason.clone(),
    ));
    let id = check_spectrum_preserving(&FilteredMorphism::identity(&cp));
    checks.push(check("geomequiv: identity is spectrum preserving", id.preserving, ""));
    let v = json!({
        "chain": chain,
        "crossed_product_blocks": cp.len(),
        "corner_blocks": corner.len(),
        "linking_blocks": m.linking.as_ref().map(|l| l.len()),
    });
    Ok((v, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("nope".parse::<Command>().is_err());
    }
}
