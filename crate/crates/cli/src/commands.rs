use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::{json, Value};

use triholo::connection::{classify_holonomy, connection_from_representation, DiscreteConnection};
use triholo::io;
use triholo::lattice::{
    apply_qplus_on, build_green, cauchy_reconstruct, green_function, poly_space_basis, taylor_coefficients,
    taylor_coefficients_by_residual, taylor_partial_sum, AdmissibleSequence, LatticeDomain, LatticeFunction,
    LatticePatch, Rect, Site,
};
use triholo::mesh::{
    bw_face_coloring, three_vertex_coloring_of, FaceColor, SubComplexDomain, TriangulatedSurface,
};
use triholo::opalgebra::{factorize, verify_qcd_identity, verify_qcd_identity_float, ExpParams, SchrodingerOperator};
use triholo::sample;
use triholo::scalar::{fmt_rational, parse_rational, rational_to_f64, Rational};
use triholo::simplicial::{
    bw_factorization_check, canonical_local_holonomy_ok, classify_holonomy_k, zero_modes_k, SimplicialComplexK,
};
use triholo::solver::{
    covariant_constants, determining_set, max_principle_check, same_subspace, solve_bw, zero_modes, Point,
};

use crate::{read_input, svg, CliError, ColorArg, Command, Format, Mode, Output, RunConfig};

pub fn run(run: &RunConfig, cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::MeshCheck => mesh_check(run),
        Command::Holonomy => holonomy(run),
        Command::Covariants => covariants(run),
        Command::Maxprinciple { values, radius } => maxprinciple(run, values.as_deref(), *radius),
        Command::Taylor { values, order } => taylor(run, values.as_deref(), *order),
        Command::Cauchy { values, size } => cauchy(run, values.as_deref(), *size),
        Command::Green => green(run),
        Command::Factorize { op, color } => factorize_cmd(run, op.as_deref(), *color),
        Command::QcdIdentity { c, d, e, l } => qcd(run, c, d, e.as_deref(), l.as_deref()),
        Command::Ksimplicial { complex } => ksimplicial(run, complex.as_deref()),
    }
}

fn rs(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

fn rvec(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rs).collect())
}

fn point(p: &Point) -> Value {
    json!([fmt_rational(&p[0]), fmt_rational(&p[1])])
}

fn site(s: Site) -> Value {
    json!([s.x, s.y])
}

fn require<'a>(p: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::Usage(format!("this command needs {flag}")))
}

fn load_surface(run: &RunConfig) -> Result<TriangulatedSurface, CliError> {
    let text = read_input(require(&run.mesh, "--mesh")?)?;
    io::parse_surface(&text).map_err(CliError::domain)
}

fn window(run: &RunConfig, default: Rect) -> Rect {
    match run.window.as_deref() {
        Some([x0, x1]) => Rect { x0: *x0, x1: *x1, y0: *x0, y1: *x1 },
        Some([x0, x1, y0, y1]) => Rect { x0: *x0, x1: *x1, y0: *y0, y1: *y1 },
        _ => default,
    }
}

fn rational_arg(flag: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Usage(format!("{flag}: expected a rational, found `{s}`")))
}

fn mesh_check(run: &RunConfig) -> Result<Output, CliError> {
    let s = load_surface(run)?;
    let mut valences: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..s.vertex_count() {
        *valences.entry(s.valence(v)).or_default() += 1;
    }
    let interior = s.interior_vertices();
    let json = json!({
        "vertices": s.vertex_count(),
        "triangles": s.triangle_count(),
        "edges": s.edge_count(),
        "closed": s.is_closed(),
        "connected": s.is_connected(),
        "orientable": s.is_orientable(),
        "euler_characteristic": s.euler_characteristic(),
        "boundary_vertices": s.boundary_vertices().len(),
        "valence_histogram": valences.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "interior_valences_even": interior.iter().all(|&v| s.valence(v) % 2 == 0),
        "bw_colorable": bw_face_coloring(&s).is_some(),
        "three_colorable": three_vertex_coloring_of(&s).is_some(),
    });
    Ok(Output::json(json, true))
}

fn load_connection<'a>(run: &RunConfig, s: &'a TriangulatedSurface) -> Result<(DiscreteConnection<'a>, Option<usize>), CliError> {
    let Some(path) = run.conn.as_deref() else {
        return Ok((DiscreteConnection::canonical(s), None));
    };
    let text = read_input(path)?;
    let is_rep = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).any(|l| l.starts_with("R "));
    if is_rep {
        let edges = io::parse_representation(&text).map_err(CliError::domain)?;
        let rc = connection_from_representation(s, &edges, run.seed).map_err(CliError::domain)?;
        Ok((rc.connection, Some(rc.attempt)))
    } else {
        Ok((io::parse_connection(&text, s).map_err(CliError::domain)?, None))
    }
}

fn holonomy(run: &RunConfig) -> Result<Output, CliError> {
    let s = load_surface(run)?;
    let (conn, attempt) = load_connection(run, &s)?;
    let h = classify_holonomy(&conn).map_err(CliError::domain)?;
    let mut json = serde_json::to_value(&h).expect("serializable");
    json["group"] = Value::String(h.group.name().to_string());
    json["dim"] = json!(h.invariant_dimension);
    json["canonical"] = json!(conn.is_canonical());
    if let Some(a) = attempt {
        json["gauge_attempt"] = json!(a);
    }
    Ok(Output::json(json, true))
}

fn covariants(run: &RunConfig) -> Result<Output, CliError> {
    let s = load_surface(run)?;
    let (conn, _) = load_connection(run, &s)?;
    let space = covariant_constants(&conn).map_err(CliError::domain)?;
    let modes = zero_modes(&conn);
    let matches = same_subspace(&space.basis, &modes);
    let json = json!({
        "group": space.group.name(),
        "dimension": space.dimension(),
        "basis": space.basis.iter().map(|v| rvec(v)).collect::<Vec<_>>(),
        "zero_modes_dimension": modes.len(),
        "zero_modes_match": matches,
    });
    Ok(Output::json(json, matches))
}

fn maxprinciple(run: &RunConfig, values: Option<&Path>, radius: i64) -> Result<Output, CliError> {
    let patch;
    let owned;
    let (surface, domain_tris): (&TriangulatedSurface, Vec<usize>) = match &run.mesh {
        Some(_) => {
            owned = load_surface(run)?;
            let tris = match &run.domain {
                Some(p) => io::parse_domain(&read_input(p)?, &owned).map_err(CliError::domain)?,
                None => (0..owned.triangle_count()).collect(),
            };
            (&owned, tris)
        }
        None => {
            patch = LatticePatch::hexagon(radius);
            (patch.surface(), (0..patch.surface().triangle_count()).collect())
        }
    };
    let coloring = bw_face_coloring(surface).ok_or_else(|| CliError::Domain {
        kind: "NotBwColorable".into(),
        message: "the mesh has no black/white colouring".into(),
    })?;
    let domain = SubComplexDomain::new(surface, domain_tris);
    let fixed: BTreeMap<usize, Rational> = match values {
        Some(p) => io::parse_vertex_values(&read_input(p)?).map_err(CliError::domain)?,
        None => {
            let mut rng = sample::rng(run.seed);
            determining_set(&domain, &coloring).into_iter().map(|v| (v, sample::small_rational(&mut rng, 20, 3))).collect()
        }
    };
    let sol = solve_bw(&domain, &coloring, &fixed).map_err(CliError::domain)?;
    let psi = sol.to_vertex_function(surface.vertex_count());
    let report = max_principle_check(&domain, &coloring, &psi).map_err(CliError::domain)?;
    let boundary: BTreeSet<usize> = report.boundary_triangles.iter().copied().collect();
    let json = json!({
        "vertices": sol.vertices.len(),
        "unique": sol.is_unique(),
        "free_directions": sol.directions.len(),
        "black_triangles": report.images.len(),
        "boundary_triangles": report.boundary_triangles,
        "images": report.images.iter().map(|(t, p)| json!({"triangle": t, "image": point(p)})).collect::<Vec<_>>(),
        "boundary_hull": report.boundary_hull.iter().map(point).collect::<Vec<_>>(),
        "hull": report.hull.iter().map(point).collect::<Vec<_>>(),
        "interior_corners": report.interior_corners.iter().map(point).collect::<Vec<_>>(),
        "violations": report.violations,
        "betweenness_failures": report.betweenness_failures,
        "coincident_pairs": report.coincident_pairs,
        "holds": report.holds(),
    });
    let f = |p: &Point| (rational_to_f64(&p[0]), rational_to_f64(&p[1]));
    let dots: Vec<((f64, f64), bool)> = report.images.iter().map(|(t, p)| (f(p), boundary.contains(t))).collect();
    let hull: Vec<(f64, f64)> = report.hull.iter().map(f).collect();
    Ok(Output { json, csv: None, svg: Some(svg::scatter_hull(&dots, &hull)), default_format: Format::Json, ok: report.holds() })
}

fn lattice_values(path: &Path) -> Result<LatticeFunction, CliError> {
    io::parse_lattice_function(&read_input(path)?).map_err(CliError::domain)
}

fn taylor(run: &RunConfig, values: Option<&Path>, order: usize) -> Result<Output, CliError> {
    let seq = AdmissibleSequence::cycling(Site::ORIGIN, order + 1);
    let top = seq.triangle(order).map_err(CliError::domain)?;
    let sites = top.sites();
    let psi = match values {
        Some(p) => lattice_values(p)?,
        None => sample::random_holomorphic(&mut sample::rng(run.seed), Site::ORIGIN, sites.iter().copied())
            .map_err(CliError::domain)?,
    };
    let basis = poly_space_basis(order, &seq, sites.iter().copied()).map_err(CliError::domain)?;
    let exp = taylor_coefficients(&psi, &basis, order).map_err(CliError::domain)?;
    let by_residual = taylor_coefficients_by_residual(&psi, &basis, order).map_err(CliError::domain)?;
    let partial_ok: Vec<bool> = (0..=order)
        .map(|k| {
            let tk = seq.triangle(k).expect("in sequence").sites();
            taylor_partial_sum(&exp, &basis, k).agrees_on(&psi, tk)
        })
        .collect();
    let routes_agree = exp.alpha == by_residual;
    let ok = routes_agree && partial_ok.iter().all(|&b| b) && exp.residual_vanishes.iter().all(|&b| b);
    let json = json!({
        "order": order,
        "coefficients": exp.alpha.iter().map(|a| rvec(a)).collect::<Vec<_>>(),
        "partial_sums_exact": partial_ok,
        "routes_agree": routes_agree,
        "holds": ok,
    });
    Ok(Output::json(json, ok))
}

fn cauchy(run: &RunConfig, values: Option<&Path>, size: usize) -> Result<Output, CliError> {
    let mut rng = sample::rng(run.seed);
    let domain = match &run.domain {
        Some(p) => LatticeDomain::new(io::parse_lattice_domain(&read_input(p)?).map_err(CliError::domain)?)
            .map_err(CliError::domain)?,
        None => sample::random_lattice_domain(&mut rng, Site::ORIGIN, size),
    };
    let verts = domain.vertices();
    let psi = match values {
        Some(p) => lattice_values(p)?,
        None => sample::random_holomorphic(&mut rng, Site::ORIGIN, verts.iter().copied()).map_err(CliError::domain)?,
    };
    let boundary = psi.restrict(domain.boundary_vertices()).map_err(CliError::domain)?;
    let rec = cauchy_reconstruct(&domain, &boundary, green_function).map_err(CliError::domain)?;
    let interior = domain.interior_vertices();
    let mismatches: Vec<Value> = interior.iter().filter(|&&n| rec.value(n) != psi.value(n)).map(|&n| site(n)).collect();
    let ok = mismatches.is_empty();
    let json = json!({
        "triangles": domain.triangles().len(),
        "vertices": verts.len(),
        "interior_vertices": interior.len(),
        "mismatches": mismatches,
        "holds": ok,
    });
    let cells: Vec<((f64, f64), f64)> =
        rec.iter().map(|(s, v)| (s.embed(), rational_to_f64(v))).collect();
    let mut csv = String::from("n1,n2,psi\n");
    for (s, v) in rec.iter() {
        csv.push_str(&format!("{},{},{}\n", s.x, s.y, fmt_rational(v)));
    }
    Ok(Output { json, csv: Some(csv), svg: Some(svg::heatmap(&cells)), default_format: Format::Json, ok })
}

fn green(run: &RunConfig) -> Result<Output, CliError> {
    let w = window(run, Rect::square(-5, 25));
    if w.is_empty() {
        return Err(CliError::Usage("--window is empty".into()));
    }
    let g = build_green(w);
    let inner: Vec<Site> = w.inset(1, 0, 1, 0).sites().collect();
    let qg = apply_qplus_on(&g, inner.iter().copied()).map_err(CliError::domain)?;
    let bad: Vec<Value> = inner
        .iter()
        .filter(|&&n| {
            let want = if n == Site::ORIGIN { Rational::from_integer(1.into()) } else { Rational::from_integer(0.into()) };
            qg.value(n) != Some(&want)
        })
        .map(|&n| site(n))
        .collect();
    let ok = bad.is_empty();
    let mut csv = String::from("n1,n2,G\n");
    for (s, v) in g.iter() {
        csv.push_str(&format!("{},{},{}\n", s.x, s.y, fmt_rational(v)));
    }
    let json = json!({
        "window": [w.x0, w.x1, w.y0, w.y1],
        "checked_sites": inner.len(),
        "delta_failures": bad,
        "holds": ok,
    });
    let cells: Vec<((f64, f64), f64)> = g.iter().map(|(s, v)| (s.embed(), rational_to_f64(v))).collect();
    Ok(Output { json, csv: Some(csv), svg: Some(svg::heatmap(&cells)), default_format: Format::Csv, ok })
}

fn factorize_cmd(run: &RunConfig, op: Option<&Path>, color: ColorArg) -> Result<Output, CliError> {
    let l = match op {
        Some(p) => {
            let op = io::parse_operator(&read_input(p)?).map_err(CliError::domain)?;
            SchrodingerOperator::new(op).map_err(CliError::domain)?
        }
        None => sample::random_schrodinger(&mut sample::rng(run.seed), window(run, Rect::square(0, 7))),
    };
    let colors: &[FaceColor] = match color {
        ColorArg::Black => &[FaceColor::Black],
        ColorArg::White => &[FaceColor::White],
        ColorArg::Both => &[FaceColor::Black, FaceColor::White],
    };
    let mut csv = String::from("color,kind,alpha1,alpha2,n1,n2,value\n");
    let mut reports = Vec::new();
    let mut ok = true;
    for &c in colors {
        let f = factorize(&l, c).map_err(CliError::domain)?;
        let name = if c == FaceColor::Black { "black" } else { "white" };
        let round_trip = f.round_trip(&l).map_err(CliError::domain)?;
        ok &= round_trip;
        for (shift, m) in &f.squares {
            for (n, v) in m {
                csv.push_str(&format!("{name},square,{},{},{},{},{}\n", shift.0, shift.1, n.x, n.y, fmt_rational(v)));
            }
        }
        for (n, v) in &f.potential {
            csv.push_str(&format!("{name},potential,0,0,{},{},{}\n", n.x, n.y, fmt_rational(v)));
        }
        let i = f.interior;
        reports.push(json!({
            "color": name,
            "interior": [i.x0, i.x1, i.y0, i.y1],
            "round_trip": round_trip,
        }));
    }
    let r = l.operator().rect();
    let json = json!({ "window": [r.x0, r.x1, r.y0, r.y1], "factorizations": reports, "holds": ok });
    Ok(Output { json, csv: Some(csv), svg: None, default_format: Format::Csv, ok })
}

fn qcd(run: &RunConfig, c: &str, d: &str, e: Option<&[String]>, l: Option<&[f64]>) -> Result<Output, CliError> {
    let w = window(run, Rect::square(0, 9));
    let report = match run.mode {
        Mode::Rational => {
            if l.is_some() {
                return Err(CliError::Usage("--l applies only to --mode float".into()));
            }
            let e: Vec<Rational> = match e {
                Some(e) => e.iter().map(|x| rational_arg("--e", x)).collect::<Result<_, _>>()?,
                None => ["2", "4", "1", "2"].iter().map(|x| rational_arg("--e", x)).collect::<Result<_, _>>()?,
            };
            let p = ExpParams {
                c: rational_arg("--c", c)?,
                d: rational_arg("--d", d)?,
                e: [[e[0].clone(), e[1].clone()], [e[2].clone(), e[3].clone()]],
            };
            verify_qcd_identity(&p, w).map_err(CliError::domain)?
        }
        Mode::Float => {
            if e.is_some() {
                return Err(CliError::Usage("--e applies only to --mode rational".into()));
            }
            let l = l.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.3, 0.5, 0.1, 0.3]);
            let parse = |flag: &str, s: &str| {
                s.parse::<f64>().map_err(|_| CliError::Usage(format!("{flag}: expected a number, found `{s}`")))
            };
            let tol = run.tol.expect("validated");
            verify_qcd_identity_float(parse("--c", c)?, parse("--d", d)?, [[l[0], l[1]], [l[2], l[3]]], w, tol)
                .map_err(CliError::domain)?
        }
    };
    let json = json!({
        "mode": if run.mode == Mode::Rational { "rational" } else { "float" },
        "window": [w.x0, w.x1, w.y0, w.y1],
        "max_relative_error": report.max_relative_error,
        "holds": report.holds,
    });
    Ok(Output::json(json, report.holds))
}

fn ksimplicial(run: &RunConfig, complex: Option<&Path>) -> Result<Output, CliError> {
    let x = match (complex, &run.mesh) {
        (Some(p), _) => io::parse_complex(&read_input(p)?).map_err(CliError::domain)?,
        (None, Some(_)) => SimplicialComplexK::from_surface(&load_surface(run)?),
        (None, None) => return Err(CliError::Usage("this command needs --complex or --mesh".into())),
    };
    let local_ok = canonical_local_holonomy_ok(&x).map_err(CliError::domain)?;
    let class = classify_holonomy_k(&x, 0).map_err(CliError::domain)?;
    let modes = zero_modes_k(&x);
    let mut json = json!({
        "k": x.k(),
        "vertices": x.vertex_count(),
        "simplices": x.simplex_count(),
        "local_holonomy_trivial": local_ok,
        "group_order": class.order(),
        "generators": class.generators.iter().map(|p| p.0.clone()).collect::<Vec<_>>(),
        "orbits": class.orbits,
        "q": class.q,
        "dim": class.dimension,
        "zero_modes_dimension": modes.len(),
    });
    let mut ok = modes.len() == class.dimension;
    if x.k() >= 2 {
        let r = bw_factorization_check(&x).map_err(CliError::domain)?;
        json["bw"] = json!({
            "rho3_trivial": r.rho3_trivial,
            "coloring_exists": r.coloring_exists,
            "black_identity": r.black_identity,
            "white_identity": r.white_identity,
            "zero_modes_match": r.zero_modes_match,
        });
        ok &= r.holds();
    }
    json["holds"] = json!(ok);
    Ok(Output::json(json, ok))
}
