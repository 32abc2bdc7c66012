//! Temporary diagnostics for the semiclassical systems.

use formbracket::bracket::{BicovBracket, BracketParams};
use formbracket::grass::{FormMat, GrassPoly};
use formbracket::group::Family;
use formbracket::quantum::build_rmatrix;
use formbracket::ring::{rat, rint, Rat, Ring};
use formbracket::semiclassical::*;
use formbracket::tensor::SpaceTensor;

fn sub_poly(a: &GrassPoly<Rat>, b: &GrassPoly<Rat>) -> GrassPoly<Rat> {
    let mut out = a.clone();
    out.add_assign(&b.neg());
    out
}

fn table_of(bk: &BicovBracket<Rat>) -> Vec<GrassPoly<Rat>> {
    bracket_pair_table(bk)
}

fn compare(
    name: &str,
    vals: &[GrassPoly<Rat>],
    table: &[GrassPoly<Rat>],
    ideal: &PairingIdeal,
) {
    let mut exact = 0usize;
    let mut mod_span = 0usize;
    let mut neither = 0usize;
    for (b, t) in vals.iter().zip(table) {
        let d = sub_poly(b, t);
        if d.is_zero() {
            exact += 1;
        } else if ideal.reduce_quadratic(&d).is_zero() {
            mod_span += 1;
        } else {
            neither += 1;
        }
    }
    println!("  vs {name}: exact={exact} mod-span={mod_span} neither={neither}");
}

fn mixed_support(group: &formbracket::group::Group, t: &SpaceTensor<GrassPoly<Rat>>) -> bool {
    let n = group.n;
    let scale = GrassPoly::constant(rat(group.eps(), n as i64));
    let p0 = group.k0::<GrassPoly<Rat>>(1, 2).scale(&scale);
    let q = SpaceTensor::<GrassPoly<Rat>>::identity(n, &[1, 2]).sub(&p0);
    p0.dot(t).dot(&p0).is_zero() && q.dot(t).dot(&q).is_zero()
}

fn main() {
    let t0 = std::time::Instant::now();
    for (family, n) in [(Family::Sp, 4), (Family::SO, 5)] {
        println!("=== {:?}({}) ===", family, n);
        let rm = build_rmatrix(family, n).unwrap();
        let sd = semiclassical_expand(&rm).unwrap();
        let group = sd.group.clone();
        let eps = rint(group.eps());
        let ideal = PairingIdeal::new(&group);
        println!(
            "[{:?}] setup; deg2 constraint rank = {}",
            t0.elapsed(),
            ideal.quadratic_rank()
        );

        // Candidate brackets.
        let fgf_plain = induced_bracket(&sd); // b0=-1, c2=+1
        let fgf_eps = {
            let mut params = BracketParams::<Rat>::zero();
            params.b[0] = -Rat::one();
            params.c[2] = eps.clone();
            BicovBracket::build(&group, params, &sd.r_skew)
        };
        let ct = counterterm_bracket(&sd);
        let t_plain = table_of(&fgf_plain);
        let t_eps = table_of(&fgf_eps);
        let t_ct = table_of(&ct);

        // Which candidates satisfy the projector-compatibility shape?
        let gt = quadratic_counterterm(&sd);
        for (name, bk) in [("fgf(+1)", &fgf_plain), ("fgf(eps)", &fgf_eps), ("counterterm", &ct)] {
            let total = bk.table().add(&gt);
            println!(
                "  {name}: table+G mixed-supported: {}",
                mixed_support(&group, &total)
            );
        }

        // Quotient extraction from the enlarged family.
        let sys = order_h_system(&rm.relations_alternative());
        println!(
            "  alternative: rows={} constraints={} match pairing: {}",
            sys.rows.len(),
            sys.constraints.len(),
            constraints_match_singlet_pairing(&sys, &group)
        );
        match sys.solve_in_quotient(&ideal) {
            None => println!("  alternative (quotient): INCONSISTENT"),
            Some(sol) => {
                let free = sys.bracket_nullspace(&sol);
                println!(
                    "  alternative (quotient): consistent, rank={}, bracket-nullspace dim={}",
                    sol.rank,
                    free.len()
                );
                let vals = sys.bracket_values(&sol);
                compare("fgf(+1)", vals, &t_plain, &ideal);
                compare("fgf(eps)", vals, &t_eps, &ideal);
                compare("counterterm", vals, &t_ct, &ideal);
            }
        }
        println!("  [{:?}] alternative done", t0.elapsed());

        // Exact (non-quotient) solve of the alternative family.
        match sys.solve() {
            None => println!("  alternative (exact): INCONSISTENT"),
            Some(sol) => {
                let free = sys.bracket_nullspace(&sol);
                println!(
                    "  alternative (exact): consistent, rank={}, bracket-nullspace dim={}",
                    sol.rank,
                    free.len()
                );
                let vals = sys.bracket_values(&sol);
                compare("fgf(eps)", vals, &t_eps, &ideal);
                compare("counterterm", vals, &t_ct, &ideal);
            }
        }

        // Per-block families: diagonal sandwiches and the mixed
        // singlet/symmetric sandwiches, separately and jointly.
        let dsys = order_h_system(&rm.relations_diagonal());
        let xsys = order_h_system(&rm.relations_cross());
        for (name, s) in [("diagonal", &dsys), ("cross", &xsys)] {
            println!(
                "  {name}: rows={} constraints={} (span rank {})",
                s.rows.len(),
                s.constraints.len(),
                s.constraint_echelon().rank()
            );
            match s.solve_in_quotient(&ideal) {
                None => println!("  {name} (quotient): INCONSISTENT"),
                Some(sol) => {
                    let free = s.bracket_nullspace(&sol);
                    println!(
                        "  {name} (quotient): consistent, rank={}, bracket-nullspace dim={}",
                        sol.rank,
                        free.len()
                    );
                }
            }
        }
        let mut jsys = dsys.clone();
        jsys.rows.extend(xsys.rows.iter().cloned());
        jsys.rhs.extend(xsys.rhs.iter().cloned());
        jsys.constraints.extend(xsys.constraints.iter().cloned());
        match jsys.solve_in_quotient(&ideal) {
            None => println!("  diagonal+cross (quotient): INCONSISTENT"),
            Some(sol) => {
                let free = jsys.bracket_nullspace(&sol);
                println!(
                    "  diagonal+cross (quotient): consistent, rank={}, bracket-nullspace dim={}",
                    sol.rank,
                    free.len()
                );
                let vals = jsys.bracket_values(&sol);
                compare("fgf(eps)", vals, &t_eps, &ideal);
                compare("counterterm", vals, &t_ct, &ideal);
            }
        }
        println!("  [{:?}] blocks done", t0.elapsed());

        // Combined family in the quotient for reference.
        let csys = order_h_system(&rm.relations_combined());
        let csol = csys.solve().expect("combined consistent");
        println!(
            "  combined: rank={} bracket-nullspace dim={} (mixed block dim {})",
            csol.rank,
            csys.bracket_nullspace(&csol).len(),
            mixed_block_dim(&group)
        );

        // Probes of the eps-candidate.
        let o = FormMat::<Rat>::generators(n);
        let g = (n * n) as u16;
        for (name, bk) in [("fgf(+1)", &fgf_plain), ("fgf(eps)", &fgf_eps)] {
            let nil = !bk.check_nilpotency().map_or(false, |r| r.pass());
            let jac = !bk.check_jacobi(true).pass();
            let tr = bk.omega_minus_trace_residual();
            let mut tr_exact = true;
            let mut tr_span = true;
            for i in 0..n {
                for j in 0..n {
                    let e = tr.at(i, j);
                    if !e.is_zero() {
                        tr_exact = false;
                    }
                    if !ideal.contains_quadratic(e) {
                        tr_span = false;
                    }
                }
            }
            let minus = o.sub(&formbracket::bracket::tilde_form(&group, &o));
            let mut leib_fail = false;
            'outer: for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            if !bk.leibniz_residual(minus.at(i, j), minus.at(k, l)).is_zero() {
                                leib_fail = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            let mut jac_in_ideal = true;
            'triples: for g1 in 0..g {
                for g2 in g1..g {
                    for g3 in g2..g {
                        if !ideal.contains_cubic(&bk.jacobiator(g1, g2, g3)) {
                            jac_in_ideal = false;
                            break 'triples;
                        }
                    }
                }
            }
            let mut first_class = true;
            'rows: for c in singlet_pairing_rows(&group) {
                if c.is_zero() {
                    continue;
                }
                for w in 0..g {
                    if !ideal.contains_cubic(&bk.pair(&c, &GrassPoly::gen(w))) {
                        first_class = false;
                        break 'rows;
                    }
                }
            }
            println!(
                "  {name}: nil_fails={nil} jac_fails={jac} tr_exact={tr_exact} tr_span={tr_span} minus_leib_fails={leib_fail} jac_in_ideal={jac_in_ideal} first_class={first_class}"
            );
        }
        println!("  [{:?}] probes done", t0.elapsed());

        let report = counterterm_poisson_check(&sd);
        println!("  counterterm poisson: {report:?}");
        println!("  [{:?}] group done", t0.elapsed());
    }
}
