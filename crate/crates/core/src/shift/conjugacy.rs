//! Extending a 1-block conjugacy `φ: X -> Y` to a conjugacy `φ̄: X̄ -> Ȳ` on a
//! larger shift `X̄ ⊃ X`.
//!
//! With `φ^{-1}` of memory and anticipation `N`,
//! `φ̄(x)_i = φ(x_i)` when `x_{[i-N, i+N]}` is a word of `X` and
//! `φ̄(x)_i = [x_{[i-N, i+N]}]` otherwise. Bracketed words are fresh symbols,
//! so no word of `X` is reused as a symbol of `Ȳ`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Hypothesis, Result};
use crate::graph::{fresh_id, higher_graph};
use crate::report::Check;
use crate::shift::code::SlidingBlockCode;
use crate::shift::presentation::{render_word, Presentation};

#[derive(Clone, Debug)]
pub struct ConjugacyExtension {
    /// Presentation of `Ȳ` as the labeled higher graph of `X̄`.
    pub ybar: Presentation,
    /// `φ̄` with memory and anticipation `N`.
    pub phibar: SlidingBlockCode,
    /// `φ̄^{-1}`, read off the symbol structure and checked for consistency
    /// on every word of length `4N + 1` of `X̄`.
    pub inverse: SlidingBlockCode,
    pub window: usize,
    pub checks: Vec<Check>,
}

/// Map `φ(u) -> u_N` over `B_{2N+1}(X)`, or `None` if two words with the same
/// image have different centers.
fn inverse_table(
    x: &Presentation,
    phi: &BTreeMap<String, String>,
    n: usize,
) -> Result<Option<BTreeMap<Vec<String>, String>>> {
    let mut table = BTreeMap::new();
    for u in x.words(2 * n + 1) {
        let image: Vec<String> = u
            .iter()
            .map(|s| phi.get(s).cloned().ok_or_else(|| Hypothesis::Conjugacy(format!("no image for the symbol `{s}`"))))
            .collect::<Result<_, _>>()?;
        match table.get(&image) {
            Some(c) if c != &u[n] => return Ok(None),
            _ => {
                table.insert(image, u[n].clone());
            }
        }
    }
    Ok(Some(table))
}

/// Smallest `N <= n_cap` for which the inverse of `φ` has memory and
/// anticipation `N` on `X`.
pub fn inverse_window(x: &Presentation, phi: &BTreeMap<String, String>, n_cap: usize) -> Result<usize> {
    for n in 0..=n_cap {
        if inverse_table(x, phi, n)?.is_some() {
            return Ok(n);
        }
    }
    Err(Error::CapReached(format!("no inverse window up to {n_cap}; φ may not be a conjugacy")))
}

/// `[w]`, with multi-character symbols separated by commas so the name has no
/// whitespace.
fn bracket_name(u: &[String]) -> String {
    if u.iter().all(|s| s.chars().count() == 1) {
        format!("[{}]", u.concat())
    } else {
        format!("[{}]", u.join(","))
    }
}

pub fn conjugacy_extension(
    x: &Presentation,
    xbar: &Presentation,
    phi: &BTreeMap<String, String>,
    window: Option<usize>,
    word_cap: usize,
    period_cap: usize,
    n_cap: usize,
) -> Result<ConjugacyExtension> {
    x.require_finite_type()?;
    xbar.require_finite_type()?;
    let n = match window {
        Some(n) => {
            if inverse_table(x, phi, n)?.is_none() {
                return Err(Hypothesis::Conjugacy(format!("φ^-1 does not have memory and anticipation {n}")).into());
            }
            n
        }
        None => inverse_window(x, phi, n_cap)?,
    };
    let mut checks = Vec::new();

    let inclusion_top = word_cap.min(2 * n + 3).max(1);
    for j in 1..=inclusion_top {
        let big = xbar.words(j);
        if let Some(w) = x.words(j).into_iter().find(|w| !big.contains(w)) {
            return Err(Hypothesis::Inclusion(format!("`{}` occurs in X but not in X̄", render_word(&w))).into());
        }
    }
    checks.push(Check::new("X inside X̄", true, format!("words of length 1..={inclusion_top} (bounded)")));

    let w = 2 * n + 1;
    let inner = x.words(w);
    let y_symbols: BTreeSet<String> = phi.values().cloned().collect();
    let mut taken: HashSet<String> = y_symbols.iter().cloned().collect();
    let mut bracket: BTreeMap<Vec<String>, String> = BTreeMap::new();
    let mut blocks = BTreeMap::new();
    for u in xbar.words(w) {
        let symbol = if inner.contains(&u) {
            phi[&u[n]].clone()
        } else {
            let s = fresh_id(bracket_name(&u), &taken);
            taken.insert(s.clone());
            bracket.insert(u.clone(), s.clone());
            s
        };
        blocks.insert(u, symbol);
    }
    let mut alphabet: Vec<String> = y_symbols.into_iter().collect();
    alphabet.extend(bracket.values().cloned());
    let phibar = SlidingBlockCode::new(xbar.clone(), None, n, n, blocks)?;

    let base = xbar.labeled().essential();
    let higher = higher_graph(&base.graph, w);
    let labels: Vec<String> = higher.edge_paths.iter().map(|p| phibar.blocks[&base.label_of(&p.edges)].clone()).collect();
    let ybar = Presentation::sofic(higher.graph.clone(), labels, alphabet)?;
    let phibar = SlidingBlockCode { codomain: Some(ybar.clone()), ..phibar };

    // φ̄^{-1}: the center of every (4N+1)-word of X̄ against its image window.
    let mut inv: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for u in xbar.words(4 * n + 1) {
        let image = phibar.apply_word(&u).expect("φ̄ is total on X̄ words");
        match inv.get(&image) {
            Some(c) if c != &u[2 * n] => {
                return Err(Hypothesis::Conjugacy(format!(
                    "two words of X̄ with centers `{c}` and `{}` share the image `{}`",
                    u[2 * n],
                    render_word(&image)
                ))
                .into())
            }
            _ => {
                inv.insert(image, u[2 * n].clone());
            }
        }
    }
    checks.push(Check::new("φ̄ injective", true, format!("consistent inverse on all {} words of length {}", inv.len(), 4 * n + 1)));
    let inverse = SlidingBlockCode { domain: ybar.clone(), codomain: Some(xbar.clone()), memory: n, anticipation: n, blocks: inv };

    checks.push(restriction_check(x, &phibar, phi, period_cap));
    checks.push(periodic_injectivity_check(xbar, &phibar, period_cap));
    if let Some(c) = checks.iter().find(|c| !c.pass) {
        return Err(Error::Invariant(format!("{}: {}", c.name, c.detail)));
    }
    Ok(ConjugacyExtension { ybar, phibar, inverse, window: n, checks })
}

fn restriction_check(x: &Presentation, phibar: &SlidingBlockCode, phi: &BTreeMap<String, String>, period_cap: usize) -> Check {
    let mut tested = 0;
    for p in 1..=period_cap {
        for pt in x.periodic_points(p) {
            let expected: Vec<String> = pt.iter().map(|s| phi[s].clone()).collect();
            if phibar.apply_periodic(&pt) != Some(expected) {
                return Check::new("φ̄ restricts to φ", false, format!("differs on `{}`", render_word(&pt)));
            }
            tested += 1;
        }
    }
    Check::new("φ̄ restricts to φ", true, format!("{tested} periodic points of X up to period {period_cap}"))
}

fn periodic_injectivity_check(xbar: &Presentation, phibar: &SlidingBlockCode, period_cap: usize) -> Check {
    let mut seen: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
    for p in 1..=period_cap {
        for pt in xbar.periodic_points(p) {
            let Some(image) = phibar.apply_periodic(&pt) else {
                return Check::new("φ̄ injective on periodic points", false, format!("undefined on `{}`", render_word(&pt)));
            };
            // Keyed by period so that a point is compared only with points of the same period word length.
            let mut key = vec![p.to_string()];
            key.extend(image);
            if let Some(prev) = seen.insert(key, pt.clone()) {
                if prev != pt {
                    return Check::new(
                        "φ̄ injective on periodic points",
                        false,
                        format!("`{}` and `{}` share an image", render_word(&prev), render_word(&pt)),
                    );
                }
            }
        }
    }
    Check::new("φ̄ injective on periodic points", true, format!("periods up to {period_cap}"))
}
