//! Every example under examples/ runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!($file);

            #[test]
            fn runs() {
                run_example().unwrap();
            }
        }
    };
}

example!(calculus_norms, "../examples/calculus_norms.rs");
example!(cayley_identity, "../examples/cayley_identity.rs");
example!(cn_decay_fit, "../examples/cn_decay_fit.rs");
example!(condition_iii, "../examples/condition_iii.rs");
example!(envelopes, "../examples/envelopes.rs");
example!(functional_calculus, "../examples/functional_calculus.rs");
example!(inverse_generator, "../examples/inverse_generator.rs");
example!(kernel_eval, "../examples/kernel_eval.rs");
example!(lower_bounds, "../examples/lower_bounds.rs");
example!(lyapunov_witness, "../examples/lyapunov_witness.rs");
example!(operator_norms, "../examples/operator_norms.rs");
example!(polynomial_decay, "../examples/polynomial_decay.rs");
example!(quadrature, "../examples/quadrature.rs");
example!(runner, "../examples/runner.rs");
example!(spectral_families, "../examples/spectral_families.rs");
