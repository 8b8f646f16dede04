//! Fixed instance sets shared by the criterion benchmarks.

use qelim::gen::gen_vars;
use qelim::{gen_random, ConstraintSystem, Formula, GenParams, Var};

/// Generated instances `(id, formula)` for seeds `0..count`, 7 variables, coefficients in [-10, 10].
pub fn generated(depth: u32, count: u64) -> Vec<(String, Formula)> {
    (0..count)
        .map(|seed| {
            let p = GenParams {
                num_vars: 7,
                depth,
                coeff_min: -10,
                coeff_max: 10,
                quantifier_prob: (1, 4),
                seed,
            };
            (
                format!("gen-v7-d{depth}-s{seed}"),
                gen_random(&p).expect("valid parameters"),
            )
        })
        .collect()
}

/// A quantifier-free formula over `x0..x{vars-1}` and the first half of its variables
/// as the block to eliminate.
pub fn single_block(vars: usize, depth: u32, seed: u64) -> (Formula, Vec<Var>) {
    let p = GenParams {
        num_vars: vars,
        depth,
        coeff_min: -10,
        coeff_max: 10,
        quantifier_prob: (0, 1),
        seed,
    };
    let f = gen_random(&p).expect("valid parameters");
    (f, gen_vars(vars)[..vars.div_ceil(2)].to_vec())
}

/// The conjunction of the first atoms of a quantifier-free instance, as a constraint system.
pub fn system(vars: usize, constraints: usize, seed: u64) -> ConstraintSystem {
    let (f, _) = single_block(vars, 10, seed);
    ConstraintSystem::new(f.atoms().into_iter().take(constraints))
}
