use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusItem {
    pub category: &'static str,
    pub name: String,
    pub statement: String,
}

fn item(category: &'static str, name: impl Into<String>, statement: impl Into<String>) -> CorpusItem {
    CorpusItem { category, name: name.into(), statement: statement.into() }
}

/// Built-in potentials, mixing measures and small verification mixtures.
pub fn registry() -> Vec<CorpusItem> {
    let mut out = vec![
        item("potential", "quadratic(s)", "U(x) = s x^2 / 2, the Gaussian free field with stiffness s"),
        item("potential", "splice(alpha,eps)", "U'(x) = min(eps x, (alpha + 1) / x), quadratic below the knee and logarithmic above"),
        item("potential", "poly-splice(beta,eps)", "U'(x) = eps min(x, x^(beta - 1)) for beta in (0, 2]"),
        item("potential", "power-growth(beta,K)", "U(x) = (1 + (x/K)^2)^(beta/2) - 1 for beta in (0, 2)"),
        item("potential", "constant", "U = 0, an improper control potential"),
        item("mixture", "pareto-mixture(alpha,eps)", "shifted Pareto on [A, inf) with A = 1 + eps^(-1/2), density alpha A^alpha k^(-alpha-1)"),
        item("mixture", "shifted-pareto(alpha,A)", "density alpha A^alpha k^(-alpha-1) on [A, inf)"),
        item("mixture", "tilted-stable(beta,K)", "k = K / sqrt(2 s) with s exponentially tilted positive (beta/2)-stable"),
        item("mixture", "two-point(k1,k2,w)", "k = k1 with probability w, k2 otherwise"),
        item("mixture", "empirical(atoms)", "uniform over the given atoms"),
    ];
    for c in surflab::inequality::standard_corpus() {
        let sm = &c.mixture;
        out.push(item(
            "small-mixture",
            c.id.clone(),
            format!(
                "nu(xi) proportional to det(F(xi))^(-1/2) prod xi^(-1) prod rho on R^{}, {} functionals, {} atoms",
                sm.dim(),
                sm.functional_count(),
                sm.atom_count()
            ),
        ));
    }
    out
}
