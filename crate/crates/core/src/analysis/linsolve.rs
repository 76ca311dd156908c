//! Exact solution of absorbing-chain equations.
//!
//! `E[s] = 1 + Σ_t P(s,t)·E[t]` over transient states. The transition graph
//! is split into strongly connected components, solved sinks first; each
//! component is a small dense system solved by Gauss–Jordan elimination
//! over the rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Sparse transient rows: `rows[s]` lists `(t, P(s,t))`, absorption mass
/// implied.
pub fn expected_steps(rows: &[Vec<(usize, Q)>]) -> Result<Vec<Q>> {
    let n = rows.len();
    let comps = tarjan(rows);
    let mut value: Vec<Option<Q>> = vec![None; n];
    let mut comp_of = vec![usize::MAX; n];
    for (ci, c) in comps.iter().enumerate() {
        for &s in c {
            comp_of[s] = ci;
        }
    }
    // tarjan emits components sinks first
    for (ci, comp) in comps.iter().enumerate() {
        let k = comp.len();
        let local: alloc::collections::BTreeMap<usize, usize> =
            comp.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut a = vec![vec![Q::zero(); k + 1]; k];
        for (i, &s) in comp.iter().enumerate() {
            a[i][i] = Q::one();
            a[i][k] = Q::one();
            for (t, p) in &rows[s] {
                if comp_of[*t] == ci {
                    a[i][local[t]] -= p;
                } else {
                    let v = value[*t].as_ref().expect("sink components are solved first");
                    a[i][k] += p * v;
                }
            }
        }
        let x = gauss_jordan(a)?;
        for (i, &s) in comp.iter().enumerate() {
            value[s] = Some(x[i].clone());
        }
    }
    Ok(value.into_iter().map(|v| v.unwrap_or_default()).collect())
}

/// Solves an augmented `k × (k+1)` system.
pub fn gauss_jordan(mut a: Vec<Vec<Q>>) -> Result<Vec<Q>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        let inv = Q::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
    }
    Ok(a.into_iter().map(|mut r| r.pop().unwrap_or_default()).collect())
}

/// Strongly connected components in reverse topological order.
pub fn tarjan(rows: &[Vec<(usize, Q)>]) -> Vec<Vec<usize>> {
    let n = rows.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    // explicit call stack: (node, next edge position)
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < rows[v].len() {
                let w = rows[v][*pos].0;
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("stack holds the component");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}
