use super::*;
use crate::model::fixtures::{a1, a2, A1_SOURCE};
use crate::model::{ChannelId, ComponentId, ExprItem, ExprSeq, KeyId};

const PRELUDE: &str = "keys CKey, CKeyP\npair(CKey, CKeyP)\nsecrets N\nchannels ch1\n";

#[test]
fn fixture_source_parses_to_a1() {
    assert_eq!(parse_architecture(A1_SOURCE).unwrap(), a1());
}

#[test]
fn fact_with_encryption_block() {
    let arch = parse_architecture(&format!("{PRELUDE}expr ch1: enc(CKey,[secret(N)])")).unwrap();
    let fact = (
        ChannelId::new("ch1"),
        ExprItem::enc("CKey", [ExprItem::secret("N")]),
    );
    assert!(arch.expr_channel().contains(&fact));
    assert_eq!(arch.expr_channel().len(), 1);
}

#[test]
fn self_subcomponent_is_a_cycle() {
    let err = parse_architecture("component X { sub X; }").unwrap_err();
    assert_eq!(
        err,
        FormatError::Validation(Error::CyclicHierarchy(vec![
            ComponentId::new("X"),
            ComponentId::new("X")
        ]))
    );
}

#[test]
fn forward_references_are_rejected() {
    let err = parse_architecture("pair(A, B)\nkeys A, B\n").unwrap_err();
    assert_eq!(
        err,
        FormatError::Invalid {
            line: 1,
            column: 6,
            error: Error::UnknownKey(KeyId::new("A"))
        }
    );

    let err =
        parse_architecture("channels c\ncomponent P { sub Q; }\ncomponent Q { }\n").unwrap_err();
    assert!(
        matches!(err.model_error(), Some(Error::UnknownComponent(_))),
        "{err}"
    );
}

#[test]
fn duplicates_are_rejected() {
    for text in [
        "keys A, A",
        "keys A\nkeys A",
        "channels c\ncomponent X { ins c; ins c; }",
        "channels c\ncomponent X { ins c, c; }",
        "component X { }\ncomponent X { }",
        "keys A\npair(A, A)\npair(A, A)",
    ] {
        let err = parse_architecture(text).unwrap_err();
        assert!(
            matches!(err.model_error(), Some(Error::Duplicate { .. })),
            "{text}: {err}"
        );
    }
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_architecture("keys A\nchannels c\nexpr c: key(A\n").unwrap_err();
    match err {
        FormatError::Parse { line, expected, .. } => {
            assert_eq!(line, 4);
            assert_eq!(expected, "`)`");
        }
        other => panic!("unexpected {other}"),
    }
    let err = parse_architecture("frobnicate x").unwrap_err();
    assert!(matches!(
        err,
        FormatError::Parse {
            line: 1,
            column: 1,
            ..
        }
    ));
    let err = parse_architecture("keys A\n  keys $").unwrap_err();
    assert!(
        matches!(
            err,
            FormatError::Parse {
                line: 2,
                column: 8,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn crlf_and_comments_are_accepted() {
    let text = A1_SOURCE.replace('\n', "\r\n");
    assert_eq!(parse_architecture(&text).unwrap(), a1());
    let text = "# leading\nkeys A # trailing\n\n\n";
    assert_eq!(parse_architecture(text).unwrap().keys().len(), 1);
}

#[test]
fn multiline_expressions_inside_brackets() {
    let text = format!("{PRELUDE}expr ch1: enc(CKey, [\n  secret(N),\n  data(3)\n])\n");
    let arch = parse_architecture(&text).unwrap();
    assert_eq!(arch.expr_channel().len(), 1);
}

#[test]
fn data_is_arbitrary_precision() {
    let item = parse_expr("data(123456789012345678901234567890)").unwrap();
    assert_eq!(item.to_string(), "data(123456789012345678901234567890)");
    assert!(parse_expr("data(-1)").is_err());
    assert!(parse_expr("data(12ab)").is_err());
}

#[test]
fn expression_lists() {
    assert_eq!(parse_expr_list("[]").unwrap(), ExprSeq::new());
    let seq = parse_expr_list("[secret(NA), key(K)]").unwrap();
    assert_eq!(
        seq,
        ExprSeq::from(vec![ExprItem::secret("NA"), ExprItem::key("K")])
    );
    assert_eq!(parse_expr_list("secret(NA), key(K)").unwrap(), seq);
    assert!(parse_expr_list("[secret(NA)").is_err());
    assert!(parse_expr("secret(N) extra").is_err());
}

#[test]
fn nesting_is_bounded() {
    let deep = |n: usize| format!("{}data(1){}", "enc(K, [".repeat(n), "])".repeat(n));
    assert!(parse_expr(&deep(MAX_NESTING)).is_ok());
    assert!(parse_expr(&deep(MAX_NESTING + 1)).is_err());
    assert!(parse_expr(&deep(100_000)).is_err());
}

#[test]
fn invalid_utf8_is_a_parse_error() {
    let err = parse_bytes(b"keys A\nkeys \xff").unwrap_err();
    assert!(
        matches!(
            err,
            FormatError::Parse {
                line: 2,
                column: 6,
                ..
            }
        ),
        "{err}"
    );
}

#[test]
fn render_round_trips_and_is_canonical() {
    for arch in [a1(), a2()] {
        let text = render_architecture(&arch);
        assert_eq!(parse_architecture(&text).unwrap(), arch);
        assert_eq!(render_architecture(&arch), text);
        assert!(text.starts_with(HEADER));
    }
    let canonical = render_architecture(&parse_architecture(A1_SOURCE).unwrap());
    assert_eq!(
        render_architecture(&parse_architecture(&canonical).unwrap()),
        canonical
    );
}

#[test]
fn render_groups_facts_per_channel() {
    let text = render_architecture(&a1());
    assert!(text.contains("expr ch1: secret(NA)\n"), "{text}");
    assert!(
        text.contains(
            "component sComp3 {\n  sub sComp1, sComp2;\n  ins ch1;\n  loc ch2;\n  out ch3;"
        ),
        "{text}"
    );
}
