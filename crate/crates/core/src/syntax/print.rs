use super::{Formula, StarMode, DEFAULT_LABEL};

// Binding strength: iff < implies < or < and < unary.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Canonical concrete syntax. Sugar is printed only where it parses back to
/// the identical tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, IFF, &mut out);
    out
}

fn as_implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Neg(inner) = f {
        if let Formula::And(a, nb) = &**inner {
            if let Formula::Neg(b) = &**nb {
                return Some((a, b));
            }
        }
    }
    None
}

fn as_disjunction(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (na, b) = as_implication(f)?;
    match na {
        Formula::Neg(a) => Some((a, b)),
        _ => None,
    }
}

fn as_biconditional(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::And(l, r) = f {
        let (a, b) = as_implication(l)?;
        let (b2, a2) = as_implication(r)?;
        if a == a2 && b == b2 {
            return Some((a, b));
        }
    }
    None
}

fn binop(out: &mut String, ctx: u8, level: u8, lhs: (&Formula, u8), op: &str, rhs: (&Formula, u8)) {
    let paren = level < ctx;
    if paren {
        out.push('(');
    }
    write(lhs.0, lhs.1, out);
    out.push_str(op);
    write(rhs.0, rhs.1, out);
    if paren {
        out.push(')');
    }
}

fn write(f: &Formula, ctx: u8, out: &mut String) {
    if let Some((a, b)) = as_biconditional(f) {
        return binop(out, ctx, IFF, (a, IFF), " <-> ", (b, IMP));
    }
    if let Some((a, b)) = as_disjunction(f) {
        return binop(out, ctx, OR, (a, OR), " | ", (b, AND));
    }
    if let Some((a, b)) = as_implication(f) {
        return binop(out, ctx, IMP, (a, OR), " -> ", (b, IMP));
    }
    if let Some((l, g)) = f.as_box() {
        out.push('[');
        if l.as_str() != DEFAULT_LABEL {
            out.push_str(l.as_str());
        }
        out.push(']');
        return write(g, UNARY, out);
    }
    match f {
        Formula::Atom(p) => out.push_str(p.as_str()),
        Formula::Bottom => out.push_str("false"),
        Formula::Neg(g) if **g == Formula::Bottom => out.push_str("true"),
        Formula::Neg(g) => {
            out.push('~');
            write(g, UNARY, out);
        }
        Formula::And(a, b) => binop(out, ctx, AND, (a, AND), " & ", (b, UNARY)),
        Formula::Diamond(l, g) => {
            out.push('<');
            if l.as_str() != DEFAULT_LABEL {
                out.push_str(l.as_str());
            }
            out.push('>');
            write(g, UNARY, out);
        }
        Formula::Sub { pivot, body, scope } => {
            out.push('<');
            out.push_str(pivot.as_str());
            out.push_str(":=");
            write(body, IFF, out);
            out.push('>');
            write(scope, UNARY, out);
        }
        Formula::Star {
            pivot,
            body,
            scope,
            mode,
        } => {
            let (open, close) = match mode {
                StarMode::Diamond => ('<', '>'),
                StarMode::Box => ('[', ']'),
            };
            out.push(open);
            out.push('(');
            out.push_str(pivot.as_str());
            out.push_str(":=");
            write(body, IFF, out);
            out.push_str(")*");
            out.push(close);
            write(scope, UNARY, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{atom, parse_formula, prop};

    #[test]
    fn golden_prints() {
        let f = Formula::sub(&prop("p"), atom("q"), atom("p"));
        assert_eq!(print_formula(&f), "<p:=q>p");
        assert_eq!(print_formula(&atom("p").or(atom("q")).and(atom("r"))), "(p | q) & r");
        assert_eq!(print_formula(&atom("p").implies(atom("q"))), "p -> q");
        assert_eq!(print_formula(&atom("p").iff(atom("q"))), "p <-> q");
        assert_eq!(print_formula(&Formula::top().boxed()), "[]true");
    }

    #[test]
    fn sugar_round_trips() {
        for src in [
            "<p:=bot; (p:=p | []<>p)*>p",
            "[q:=true; (q:=[]q)*]q",
            "(p -> q) -> r",
            "p -> q -> r",
            "~p | ~q",
            "(p <-> q) <-> r",
            "[c]~<d>p",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f, "{src}");
        }
    }
}
