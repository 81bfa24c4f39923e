//! Coefficient automata built from the closure of f under the section operators.
//!
//! States are coordinate vectors over the lattice basis of C′, so equality is
//! exact and the closure is finite. Automata read digit tuples least
//! significant first; a tuple r = (r_1, …, r_n) is numbered lexicographically,
//! r_1 most significant.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cartier::{digit_tuple_indices, digit_tuples, BranchSpace};
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::io::{elem_from_json, elem_json, field_from_json, field_json, parse_json, to_json_text};
use crate::series::Branch;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfaoState {
    pub vector: Vec<FieldElem>,
    pub output: FieldElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    field: Field,
    n: usize,
    initial: usize,
    states: Vec<DfaoState>,
    /// `transitions[s][d]` is the target of state s on the d-th digit tuple.
    transitions: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

impl Dfao {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states(&self) -> &[DfaoState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn transition(&self, state: usize, digit_index: usize) -> usize {
        self.transitions[state][digit_index]
    }

    /// Digit tuples in the order used by [`Dfao::transition`].
    pub fn digit_tuples(&self) -> Vec<Vec<u32>> {
        digit_tuples(self.p() as u32, self.n)
    }

    /// Runs an explicit LSD-first sequence of digit-tuple positions.
    pub fn run(&self, digits: &[usize]) -> FieldElem {
        let s = digits.iter().fold(self.initial, |s, &d| self.transitions[s][d]);
        let steps = (digits.len() % self.field.e() as usize) as i64;
        self.field.frobenius_pow(self.states[s].output, steps)
    }
}

/// Breadth-first closure of f under all S_r. Fails with `StateBudgetExceeded`
/// (carrying the state vectors found so far) once more than `max_states`
/// states appear.
pub fn build_dfao(b: &Branch, max_states: usize) -> Result<Dfao> {
    build_dfao_in(&BranchSpace::new(b)?, max_states)
}

pub fn build_dfao_in(space: &std::sync::Arc<BranchSpace>, max_states: usize) -> Result<Dfao> {
    let ntuples = space.digit_tuples().len();
    let start = space.embed_f().vector();
    let mut ids: HashMap<Vec<FieldElem>, usize> = HashMap::new();
    let mut vectors = vec![start.clone()];
    ids.insert(start, 0);
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut row = Vec::with_capacity(ntuples);
        for d in 0..ntuples {
            let img = space.apply_section_vector(&vectors[s], d)?;
            let id = match ids.get(&img) {
                Some(&id) => id,
                None => {
                    if vectors.len() == max_states {
                        return Err(Error::StateBudgetExceeded {
                            max_states,
                            partial_outputs: vectors
                                .iter()
                                .map(|v| v.iter().map(|x| x.packed()).collect())
                                .collect(),
                        });
                    }
                    let id = vectors.len();
                    ids.insert(img.clone(), id);
                    vectors.push(img);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        transitions.push(row);
    }
    let states = vectors
        .into_iter()
        .map(|v| DfaoState { output: space.constant_term_of(&v), vector: v })
        .collect();
    Ok(Dfao { field: space.field().clone(), n: space.nvars(), initial: 0, states, transitions })
}

/// a(index), read off the automaton.
pub fn dfao_query(m: &Dfao, index: &[BigUint]) -> Result<FieldElem> {
    if index.len() != m.n {
        return Err(Error::MalformedInput(format!("index has {} coordinates, expected {}", index.len(), m.n)));
    }
    Ok(m.run(&digit_tuple_indices(index, m.p())))
}

fn to_value(m: &Dfao) -> Value {
    let tuples = m.digit_tuples();
    let states: Vec<Value> = m
        .states
        .iter()
        .map(|s| {
            json!({
                "vector": s.vector.iter().map(|&x| elem_json(&m.field, x)).collect::<Vec<_>>(),
                "output": elem_json(&m.field, s.output),
            })
        })
        .collect();
    let transitions: Vec<Value> = m
        .transitions
        .iter()
        .enumerate()
        .flat_map(|(s, row)| row.iter().enumerate().map(move |(d, &t)| (s, d, t)))
        .map(|(s, d, t)| json!([s, tuples[d], t]))
        .collect();
    json!({
        "p": m.p(),
        "n": m.n,
        "field": field_json(&m.field),
        "initial": m.initial,
        "states": states,
        "transitions": transitions,
    })
}

fn to_dot(m: &Dfao) -> String {
    let tuples = m.digit_tuples();
    let mut out = String::from("digraph dfao {\n  rankdir=LR;\n  start [shape=point];\n");
    writeln!(out, "  start -> s{};", m.initial).unwrap();
    for (i, s) in m.states.iter().enumerate() {
        writeln!(out, "  s{i} [shape=circle, label=\"s{i} / {}\"];", m.field.fmt_elem(s.output)).unwrap();
    }
    for (s, row) in m.transitions.iter().enumerate() {
        for (d, &t) in row.iter().enumerate() {
            let label = tuples[d].iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            writeln!(out, "  s{s} -> s{t} [label=\"({label})\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Deterministic text form of the automaton.
pub fn export_dfao(m: &Dfao, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => to_json_text(&to_value(m)),
        ExportFormat::Dot => to_dot(m),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRaw {
    vector: Vec<Value>,
    output: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DfaoRaw {
    p: u64,
    n: usize,
    field: Value,
    initial: usize,
    states: Vec<StateRaw>,
    transitions: Vec<(usize, Vec<u32>, usize)>,
}

/// Inverse of the JSON export; checks totality and consistency.
pub fn parse_dfao(text: &str) -> Result<Dfao> {
    let raw: DfaoRaw = parse_json(text)?;
    let bad = |msg: String| Error::MalformedInput(msg);
    let field = field_from_json(&raw.field)?;
    if field.p() != raw.p {
        return Err(bad(format!("p = {} disagrees with the field characteristic {}", raw.p, field.p())));
    }
    if raw.n == 0 {
        return Err(bad("n must be positive".into()));
    }
    let nstates = raw.states.len();
    if raw.initial >= nstates {
        return Err(bad(format!("initial state {} out of range", raw.initial)));
    }
    let states = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let what = format!("states[{i}]");
            Ok(DfaoState {
                vector: s.vector.iter().map(|x| elem_from_json(&field, x, &what)).collect::<Result<_>>()?,
                output: elem_from_json(&field, &s.output, &what)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tuples = digit_tuples(raw.p as u32, raw.n);
    let position: HashMap<&Vec<u32>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut transitions = vec![vec![usize::MAX; tuples.len()]; nstates];
    for (from, digits, to) in &raw.transitions {
        let d = *position.get(digits).ok_or_else(|| bad(format!("bad digit tuple {digits:?}")))?;
        if *from >= nstates || *to >= nstates {
            return Err(bad(format!("transition {from} -> {to} out of range")));
        }
        if transitions[*from][d] != usize::MAX {
            return Err(bad(format!("duplicate transition from {from} on {digits:?}")));
        }
        transitions[*from][d] = *to;
    }
    if transitions.iter().flatten().any(|&t| t == usize::MAX) {
        return Err(bad("transition table is not total".into()));
    }
    Ok(Dfao { field, n: raw.n, initial: raw.initial, states, transitions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartier::coeff_query;
    use crate::poly::MultiPoly;

    fn poly(field: &Field, n: usize, terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_int_terms(field, n, &terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect::<Vec<_>>())
            .unwrap()
    }

    fn pascal2() -> Branch {
        let f = Field::prime(2).unwrap();
        let e = poly(&f, 2, &[(&[0, 0, 1], 1), (&[1, 0, 1], 1), (&[0, 1, 1], 1), (&[0, 0, 0], 1)]);
        Branch::new(e, f.one()).unwrap()
    }

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn pascal_mod_two() {
        let m = build_dfao(&pascal2(), 64).unwrap();
        assert!(m.num_states() <= 16);
        assert!(dfao_query(&m, &big(&[3, 5])).unwrap().is_zero());
        assert_eq!(dfao_query(&m, &big(&[0, 0])).unwrap(), m.field().one());
        for i in 0..64u64 {
            for j in 0..64u64 {
                let want = u64::from((i & j) == 0);
                assert_eq!(dfao_query(&m, &big(&[i, j])).unwrap().packed(), want, "({i}, {j})");
            }
        }
    }

    #[test]
    fn constant_branch() {
        let f = Field::prime(5).unwrap();
        let e = poly(&f, 1, &[(&[0, 1], 1), (&[0, 0], -3)]);
        let m = build_dfao(&Branch::new(e, f.from_int(3)).unwrap(), 8).unwrap();
        // vectors y, 3 and 0: the first two both denote the constant 3
        assert_eq!(m.num_states(), 3);
        let mut outputs: Vec<u64> = m.states().iter().map(|s| s.output.packed()).collect();
        outputs.sort();
        outputs.dedup();
        assert_eq!(outputs, vec![0, 3]);
        assert_eq!(dfao_query(&m, &big(&[0])).unwrap(), f.from_int(3));
        assert!(dfao_query(&m, &big(&[7])).unwrap().is_zero());
    }

    #[test]
    fn artin_schreier_has_a_zero_digit_fixed_point() {
        let f = Field::prime(2).unwrap();
        let e = poly(&f, 1, &[(&[0, 2], 1), (&[0, 1], 1), (&[1, 0], 1)]);
        let m = build_dfao(&Branch::new(e, f.zero()).unwrap(), 16).unwrap();
        assert_eq!(m.transition(m.initial(), 0), m.initial());
    }

    #[test]
    fn budget_is_enforced() {
        match build_dfao(&pascal2(), 1) {
            Err(Error::StateBudgetExceeded { max_states: 1, partial_outputs }) => assert_eq!(partial_outputs.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn agrees_with_coefficient_queries_over_extension_field() {
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let w = f4.from_coeffs(&[0, 1]).unwrap();
        let e = MultiPoly::from_terms(
            &f4,
            1,
            vec![(vec![0, 2], f4.one()), (vec![0, 1], f4.one()), (vec![1, 0], w)],
        )
        .unwrap();
        let b = Branch::new(e, f4.one()).unwrap();
        let m = build_dfao(&b, 64).unwrap();
        for i in [0u64, 1, 2, 3, 5, 8, 13, 100, 1023, 1024, 99999] {
            let want = coeff_query(&b, &big(&[i])).unwrap();
            assert_eq!(dfao_query(&m, &big(&[i])).unwrap(), want);
            // leading zero digit tuples change nothing
            let mut digits = digit_tuple_indices(&big(&[i]), 2);
            digits.extend([0, 0, 0]);
            assert_eq!(m.run(&digits), want);
        }
    }

    #[test]
    fn exports() {
        let m = build_dfao(&pascal2(), 64).unwrap();
        let text = export_dfao(&m, ExportFormat::Json);
        let back = parse_dfao(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(export_dfao(&back, ExportFormat::Json), text);
        assert_eq!(export_dfao(&build_dfao(&pascal2(), 64).unwrap(), ExportFormat::Json), text);

        let loops: Vec<Value> = digit_tuples(3, 2).into_iter().map(|r| json!([0, r, 0])).collect();
        let text = json!({
            "p": 3, "n": 2, "field": {"p": 3}, "initial": 0,
            "states": [{"vector": [[0]], "output": [0]}],
            "transitions": loops,
        });
        let one_state = parse_dfao(&text.to_string()).unwrap();
        assert_eq!(one_state.num_states(), 1);
        let dot = export_dfao(&one_state, ExportFormat::Dot);
        assert_eq!(dot.matches("[shape=circle").count(), 1);
        assert_eq!(dot.matches("s0 -> s0").count(), 9);
        assert_eq!(export_dfao(&m, ExportFormat::Dot), export_dfao(&back, ExportFormat::Dot));
    }

    #[test]
    fn rejects_broken_automata() {
        let m = build_dfao(&pascal2(), 64).unwrap();
        let mut v: Value = serde_json::from_str(&export_dfao(&m, ExportFormat::Json)).unwrap();
        v["transitions"].as_array_mut().unwrap().pop();
        assert!(matches!(parse_dfao(&v.to_string()), Err(Error::MalformedInput(_))));
        let mut v: Value = serde_json::from_str(&export_dfao(&m, ExportFormat::Json)).unwrap();
        v["extra"] = json!(1);
        assert!(matches!(parse_dfao(&v.to_string()), Err(Error::MalformedInput(_))));
    }
}
