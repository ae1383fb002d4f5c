//! The constraint language: typed AST, parser, canonical printer, validator.

pub mod ast;
pub mod parse;
pub mod print;
pub mod validate;

pub use ast::{
    AccessMode, ConstraintProgram, HardConstraint, LoopOp, Node, NodeId, NodeKind, RelationSpec,
    ScoreTerm, Span, Ty,
};
pub use parse::{parse, type_check, ParseError};
pub use print::print;
pub use validate::{validate, Diagnostic};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::TagRegistry;

    const DINING: &str = r#"
; Dining room: a table with chairs around it, aligned and symmetric.
(def room (semantics scene "dining-room"))
(def tables (related_to (semantics scene "dining-table") room
             (stable_against "base" "floor" 0.0)))
(def chairs (related_to (semantics scene "chair") room
             (stable_against "base" "floor" 0.0)))

(hard table-count (in_range (count tables) 1 1))
(hard chair-count (in_range (count chairs) 2 8))

(score chair-table-spacing :weight 1.0
  (hinge (min_distance chairs tables) 0.1 0.6))
(score chairs-face-table :weight 0.8 (angle_alignment_cost chairs tables))
(score chair-symmetry :weight 0.5 (rotation_asymmetry chairs))
(score chair-mirror :weight 0.3 (reflection_asymmetry chairs tables))
(score seat-count :weight 0.2 (- 8.0 (count chairs)))
"#;

    #[test]
    fn parses_boolean_root() {
        let text = r#"
(def table-set (semantics scene "table"))
(hard enough-chairs
  (<= 2.0 (count (related_to (semantics scene "chair") table-set
                  (stable_against "front" "side" 0.05)))))
"#;
        let p = parse(text).unwrap();
        assert_eq!(p.hards.len(), 1);
        assert_eq!(p.hards[0].name, "enough-chairs");
    }

    #[test]
    fn dining_program_type_checks() {
        let p = parse(DINING).unwrap();
        assert_eq!(p.hards.len(), 2);
        assert_eq!(p.scores.len(), 5);
        let reg = TagRegistry::builtin();
        assert!(validate(&p, &reg).is_empty());
    }

    #[test]
    fn count_of_scalar_is_a_type_error() {
        let err = parse("(hard bad (<= (count 3.0) 4.0))").unwrap_err();
        assert!(err.msg.contains("expected set"), "{}", err.msg);
    }

    #[test]
    fn score_root_must_be_scalar() {
        let err = parse("(score s :weight 1.0 (== 1.0 1.0))").unwrap_err();
        assert!(err.msg.contains("must be scalar"), "{}", err.msg);
    }

    #[test]
    fn hard_root_must_be_bool() {
        let err = parse("(hard h (count scene))").unwrap_err();
        assert!(err.msg.contains("must be bool"), "{}", err.msg);
    }

    #[test]
    fn unbound_loop_variable_is_an_error() {
        let err = parse("(hard h (== (count b) 1.0))").unwrap_err();
        assert!(err.msg.contains("unbound symbol"), "{}", err.msg);
    }

    #[test]
    fn loop_variable_binds_in_body() {
        let text = r#"
(hard shelves-stocked
  (all s (semantics scene "shelf")
    (in_range (count (related_to (semantics scene "book") s
                      (supported_by "base" "shelf"))) 1 5)))
"#;
        let p = parse(text).unwrap();
        assert_eq!(p.hards.len(), 1);
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(parse("(score s :weight -1.0 (count scene))").is_err());
    }

    #[test]
    fn errors_carry_location() {
        let err = parse("(hard h\n  (== (count 3.0) 4.0))").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.col > 0);
    }

    #[test]
    fn empty_program_prints_empty() {
        let p = parse("").unwrap();
        assert!(p.is_empty());
        assert_eq!(print(&p), "");
    }

    #[test]
    fn round_trip_preserves_structure() {
        let p = parse(DINING).unwrap();
        let text = print(&p);
        let p2 = parse(&text).unwrap();
        assert!(p.structurally_equal(&p2), "printed:\n{text}");
    }

    #[test]
    fn print_is_idempotent_after_parse() {
        let p1 = parse(DINING).unwrap();
        let t1 = print(&p1);
        let p2 = parse(&t1).unwrap();
        let t2 = print(&p2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn shared_subexpression_prints_once() {
        let p = parse(DINING).unwrap();
        let text = print(&p);
        // `room` feeds both filters, so it must be printed as a def.
        assert_eq!(text.matches("(def room").count(), 1);
        assert!(text.matches("\"dining-room\"").count() == 1, "{text}");
        let p2 = parse(&text).unwrap();
        assert!(p.structurally_equal(&p2));
    }

    #[test]
    fn validator_flags_unknown_tag_with_suggestion() {
        let p = parse(r#"(hard h (== (count (semantics scene "sofaa")) 1.0))"#).unwrap();
        let reg = TagRegistry::builtin();
        let diags = validate(&p, &reg);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("sofa"), "{}", diags[0].message);
    }

    #[test]
    fn validator_accepts_builder_program() {
        let p = parse(DINING).unwrap();
        assert!(validate(&p, &TagRegistry::builtin()).is_empty());
    }

    #[test]
    fn ill_kinded_combinations_rejected() {
        // Grammar-derived negative suite: every operator applied to at least
        // one wrong-kinded argument must fail to parse.
        let bad = [
            "(hard h (count 1.0))",
            "(hard h (semantics 1.0 \"chair\"))",
            "(hard h (related_to scene 1.0 (supported_by \"base\" \"top\")))",
            "(score s :weight 1.0 (area 2.0))",
            "(score s :weight 1.0 (volume (== 1.0 1.0)))",
            "(score s :weight 1.0 (min_distance scene 3.0))",
            "(score s :weight 1.0 (angle_alignment_cost 1.0 scene))",
            "(score s :weight 1.0 (rotation_asymmetry 1.0))",
            "(score s :weight 1.0 (reflection_asymmetry scene 1.0))",
            "(score s :weight 1.0 (accessibility_cost scene 1.0 fast))",
            "(score s :weight 1.0 (focus_score 1.0 scene))",
            "(score s :weight 1.0 (freespace_2d scene 1.0))",
            "(score s :weight 1.0 (+ scene 1.0))",
            "(score s :weight 1.0 (- 1.0 scene))",
            "(score s :weight 1.0 (* (== 1.0 1.0) 1.0))",
            "(score s :weight 1.0 (/ 1.0 scene))",
            "(score s :weight 1.0 (pow scene 2.0))",
            "(score s :weight 1.0 (hinge scene 0.0 1.0))",
            "(hard h (== scene 1.0))",
            "(hard h (< 1.0 scene))",
            "(hard h (<= scene scene))",
            "(hard h (in_range scene 0.0 1.0))",
            "(hard h (and (== 1.0 1.0) 1.0))",
            "(hard h (all x scene (count x)))",
            "(score s :weight 1.0 (sum x scene (== 1.0 1.0)))",
            "(score s :weight 1.0 (mean x 1.0 x))",
        ];
        for text in bad {
            assert!(parse(text).is_err(), "should reject: {text}");
        }
    }

    #[test]
    fn parser_handles_junk_without_panicking() {
        for text in [
            "(((((",
            ")))",
            "(hard",
            "(hard h",
            "\"unterminated",
            "(score s :weight nan (count scene))",
            "(def def def)",
            "(hard h (== 1.0 1.0)) trailing",
            "\u{0}\u{1}\u{2}",
        ] {
            let _ = parse(text); // must return, not panic
        }
    }
}
