//! JSON encodings shared by reports and the command line.
//!
//! Integers that fit in an `i64` are numbers, larger ones are decimal
//! strings. Elements are integer arrays, subgroups are generator arrays and
//! relations are arrays of `[a, b]` generator pairs.

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::group::{FgAbGroup, Index, Subgroup};
use crate::lattice::{Int, Vector};
use crate::relation::BiRelation;

pub fn int(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

pub fn vector(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn group(a: &FgAbGroup) -> Value {
    json!({
        "free_rank": a.free_rank(),
        "torsion": a.torsion_factors().iter().map(int).collect::<Vec<_>>(),
    })
}

pub fn subgroup(b: &Subgroup) -> Value {
    Value::Array(b.generators().iter().map(|g| vector(g)).collect())
}

pub fn index(i: &Index) -> Value {
    match i {
        Index::Finite(n) => int(n),
        Index::Infinite => Value::from("infinite"),
    }
}

pub fn relation(r: &BiRelation) -> Value {
    Value::Array(r.generator_pairs().iter().map(|(a, b)| Value::Array(vec![vector(a), vector(b)])).collect())
}

pub fn pair(a: &[Int], b: &[Int]) -> Value {
    Value::Array(vec![vector(a), vector(b)])
}

pub fn parse_int(v: &Value) -> Option<Int> {
    match v {
        Value::Number(n) => n.as_i64().map(Int::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn parse_vector(v: &Value) -> Option<Vector> {
    v.as_array()?.iter().map(parse_int).collect()
}

pub fn parse_pairs(v: &Value) -> Option<Vec<(Vector, Vector)>> {
    v.as_array()?
        .iter()
        .map(|p| {
            let p = p.as_array()?;
            match p.as_slice() {
                [a, b] => Some((parse_vector(a)?, parse_vector(b)?)),
                _ => None,
            }
        })
        .collect()
}

pub fn parse_relation(a: &FgAbGroup, v: &Value) -> Option<BiRelation> {
    BiRelation::from_graph(a, &parse_pairs(v)?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vector as vec_of;

    #[test]
    fn big_integers_become_strings() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(int(&big), Value::from("123456789012345678901234567890"));
        assert_eq!(parse_int(&int(&big)), Some(big));
        assert_eq!(int(&Int::from(-5)), Value::from(-5));
    }

    #[test]
    fn relations_round_trip() {
        let a = FgAbGroup::new(1, &[2]).unwrap();
        let r = BiRelation::from_graph(&a, &[(vec_of(&[2, 0]), vec_of(&[1, 1]))]).unwrap();
        assert_eq!(parse_relation(&a, &relation(&r)), Some(r));
    }
}
