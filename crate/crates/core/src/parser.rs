//! Recursive-descent parser.
//!
//! Precedence, loosest first: `OR`, `XOR`, `AND`, `NOT`, `IS`, comparison /
//! `BETWEEN` / `IN`, `||`, `+ -`, `* /`. Binary operators associate left.
//! A `-` directly before a numeric literal is folded into the literal.

use crate::ast::*;
use crate::error::SyntaxError;
use crate::lexer::{is_reserved, tokenize, Tok, Token};

pub fn parse(text: &str) -> Result<Query, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let q = p.query()?;
    p.eat(&Tok::Semi);
    p.expect_eof()?;
    Ok(q)
}

/// Parses a standalone value expression.
pub fn parse_expr(text: &str) -> Result<ValueExpr, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

type PResult<T> = Result<T, SyntaxError>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = &self.tokens[self.pos];
        SyntaxError {
            offset: t.offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&[&t.describe()]))
        }
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_word(kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&[kw]))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Word(w) if !is_reserved(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    // ---- queries ----

    fn query(&mut self) -> PResult<Query> {
        let mut q = self.query_term()?;
        while let Some(op) = self.set_op()? {
            let right = self.query_term()?;
            q = Query::set_op(op, q, right);
        }
        if self.at_kw("ORDER") {
            self.bump();
            self.expect_kw("BY")?;
            let column = self.column_ref()?;
            let direction = if self.eat_kw("DESC") {
                Direction::Desc
            } else {
                self.eat_kw("ASC");
                Direction::Asc
            };
            q.order_by = Some(OrderBy { column, direction });
        }
        Ok(q)
    }

    fn query_term(&mut self) -> PResult<Query> {
        if self.eat(&Tok::LParen) {
            let q = self.query()?;
            self.expect(&Tok::RParen)?;
            Ok(q)
        } else if self.at_kw("SELECT") {
            Ok(Query::select(self.select()?))
        } else {
            Err(self.error(&["SELECT", "`(`"]))
        }
    }

    fn set_op(&mut self) -> PResult<Option<SetOp>> {
        let (plain, all) = if self.at_kw("UNION") {
            (SetOp::Union, SetOp::UnionAll)
        } else if self.at_kw("INTERSECT") {
            (SetOp::Intersect, SetOp::IntersectAll)
        } else if self.at_kw("EXCEPT") {
            (SetOp::Except, SetOp::ExceptAll)
        } else {
            return Ok(None);
        };
        self.bump();
        if self.eat_kw("ALL") {
            Ok(Some(all))
        } else {
            self.eat_kw("DISTINCT");
            Ok(Some(plain))
        }
    }

    fn select(&mut self) -> PResult<Select> {
        self.expect_kw("SELECT")?;
        let mut modifier = None;
        if self.eat_kw("DISTINCT") {
            modifier = Some(SelectModifier::Distinct);
        } else if self.eat_kw("ALL") {
            modifier = Some(SelectModifier::All);
        } else if let Some(f) = self.agg_func() {
            self.bump();
            modifier = Some(SelectModifier::Aggregate(f));
        }
        let items = if modifier.is_some_and(|m| matches!(m, SelectModifier::Aggregate(_)))
            && *self.peek() == Tok::LParen
            && *self.peek_at(1) == Tok::Star
            && *self.peek_at(2) == Tok::RParen
        {
            self.pos += 3;
            SelectList::Star
        } else {
            self.select_list()?
        };
        let from = if self.eat_kw("FROM") {
            let mut refs = vec![self.table_ref()?];
            while self.eat(&Tok::Comma) {
                refs.push(self.table_ref()?);
            }
            Some(refs)
        } else {
            None
        };
        let where_clause = if self.eat_kw("WHERE") {
            Some(self.expr()?)
        } else {
            None
        };
        let mut group_by = None;
        if self.eat_kw("GROUP") {
            self.expect_kw("BY")?;
            group_by = Some(self.column_ref()?);
        }
        // HAVING without GROUP BY is parsed and rejected by validation.
        let having = if self.eat_kw("HAVING") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Select {
            modifier,
            items,
            from,
            where_clause,
            group_by,
            having,
        })
    }

    fn agg_func(&self) -> Option<AggFunc> {
        AggFunc::ALL.into_iter().find(|f| self.at_kw(f.sql()))
    }

    fn select_list(&mut self) -> PResult<SelectList> {
        if self.eat(&Tok::Star) {
            return Ok(SelectList::Star);
        }
        let mut items = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            items.push(self.expr()?);
        }
        Ok(SelectList::Items(items))
    }

    fn table_ref(&mut self) -> PResult<TableRef> {
        let left = self.ident()?;
        let kind = if self.eat_kw("CROSS") {
            JoinKind::Cross
        } else if self.eat_kw("NATURAL") {
            JoinKind::Natural
        } else if self.eat_kw("INNER") {
            JoinKind::Inner
        } else if self.eat_kw("LEFT") {
            self.eat_kw("OUTER");
            JoinKind::Left
        } else if self.eat_kw("RIGHT") {
            self.eat_kw("OUTER");
            JoinKind::Right
        } else if self.eat_kw("FULL") {
            self.eat_kw("OUTER");
            JoinKind::Full
        } else if self.at_kw("JOIN") {
            JoinKind::Inner
        } else {
            return Ok(TableRef::Table(left));
        };
        self.expect_kw("JOIN")?;
        let right = self.ident()?;
        let on = if kind.is_qualified() {
            self.expect_kw("ON")?;
            Some(self.expr()?)
        } else {
            None
        };
        Ok(TableRef::Join(JoinedTable {
            kind,
            left,
            right,
            on,
        }))
    }

    fn column_ref(&mut self) -> PResult<ColumnRef> {
        let first = self.ident()?;
        if self.eat(&Tok::Dot) {
            let col = self.ident()?;
            Ok(ColumnRef::new(first, col))
        } else {
            Ok(ColumnRef::bare(first))
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<ValueExpr> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.xor_expr()?;
        while self.eat_kw("OR") {
            let r = self.xor_expr()?;
            e = ValueExpr::logical(LogicalOp::Or, e, r);
        }
        Ok(e)
    }

    fn xor_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.and_expr()?;
        while self.eat_kw("XOR") {
            let r = self.and_expr()?;
            e = ValueExpr::logical(LogicalOp::Xor, e, r);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.not_expr()?;
        while self.eat_kw("AND") {
            let r = self.not_expr()?;
            e = ValueExpr::logical(LogicalOp::And, e, r);
        }
        Ok(e)
    }

    fn not_expr(&mut self) -> PResult<ValueExpr> {
        // NOT EXISTS is plain NOT applied to EXISTS
        if self.eat_kw("NOT") {
            return Ok(ValueExpr::Not(Box::new(self.not_expr()?)));
        }
        self.is_expr()
    }

    fn is_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.cmp_expr()?;
        while self.eat_kw("IS") {
            let negated = self.eat_kw("NOT");
            let test = if self.eat_kw("TRUE") {
                IsTest::True
            } else if self.eat_kw("FALSE") {
                IsTest::False
            } else if self.eat_kw("UNKNOWN") {
                IsTest::Unknown
            } else if self.eat_kw("NULL") {
                IsTest::Null
            } else {
                return Err(self.error(&["TRUE", "FALSE", "UNKNOWN", "NULL"]));
            };
            e = ValueExpr::Is {
                expr: Box::new(e),
                negated,
                test,
            };
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.concat_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Eq => Some(CompareOp::Eq),
                Tok::NotEq => Some(CompareOp::NotEq),
                Tok::Lt => Some(CompareOp::Lt),
                Tok::Gt => Some(CompareOp::Gt),
                Tok::LtEq => Some(CompareOp::LtEq),
                Tok::GtEq => Some(CompareOp::GtEq),
                _ => None,
            };
            if let Some(op) = op {
                self.bump();
                let r = self.concat_expr()?;
                e = ValueExpr::compare(op, e, r);
                continue;
            }
            let negated = if self.at_kw("NOT")
                && (self.peek_at(1).is_word("BETWEEN") || self.peek_at(1).is_word("IN"))
            {
                self.bump();
                true
            } else {
                false
            };
            if self.eat_kw("BETWEEN") {
                let low = self.concat_expr()?;
                self.expect_kw("AND")?;
                let high = self.concat_expr()?;
                e = ValueExpr::Between {
                    expr: Box::new(e),
                    negated,
                    low: Box::new(low),
                    high: Box::new(high),
                };
            } else if self.eat_kw("IN") {
                self.expect(&Tok::LParen)?;
                if let Some(q) = self.try_query_then_rparen() {
                    e = ValueExpr::InSubquery {
                        expr: Box::new(e),
                        negated,
                        query: Box::new(q),
                    };
                } else {
                    let mut list = vec![self.expr()?];
                    while self.eat(&Tok::Comma) {
                        list.push(self.expr()?);
                    }
                    self.expect(&Tok::RParen)?;
                    e = ValueExpr::InList {
                        expr: Box::new(e),
                        negated,
                        list,
                    };
                }
            } else {
                return Ok(e);
            }
        }
    }

    /// After an opening parenthesis: if a complete query followed by `)`
    /// starts here, consume it; otherwise leave the position untouched.
    fn try_query_then_rparen(&mut self) -> Option<Query> {
        if !self.starts_query() {
            return None;
        }
        let save = self.pos;
        match self.query() {
            Ok(q) if self.eat(&Tok::RParen) => Some(q),
            _ => {
                self.pos = save;
                None
            }
        }
    }

    fn starts_query(&self) -> bool {
        let mut n = 0;
        while *self.peek_at(n) == Tok::LParen {
            n += 1;
        }
        self.peek_at(n).is_word("SELECT")
    }

    fn concat_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.add_expr()?;
        while self.eat(&Tok::Concat) {
            let r = self.add_expr()?;
            e = ValueExpr::Concat(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn add_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.mul_expr()?;
            e = ValueExpr::arith(op, e, r);
        }
    }

    fn mul_expr(&mut self) -> PResult<ValueExpr> {
        let mut e = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => return Ok(e),
            };
            self.bump();
            let r = self.primary()?;
            e = ValueExpr::arith(op, e, r);
        }
    }

    fn number(&mut self, negative: bool) -> PResult<ValueExpr> {
        let at = self.pos;
        let out_of_range = |p: &Parser| SyntaxError {
            offset: p.tokens[at].offset,
            expected: vec!["number within range".into()],
            found: p.tokens[at].tok.describe(),
        };
        match self.bump() {
            Tok::Int(s) => {
                let n: i128 = s.parse().map_err(|_| out_of_range(self))?;
                let n = if negative { -n } else { n };
                i64::try_from(n)
                    .map(ValueExpr::Int)
                    .map_err(|_| out_of_range(self))
            }
            Tok::Decimal(s) => {
                let f: f64 = s.parse().map_err(|_| out_of_range(self))?;
                if !f.is_finite() {
                    return Err(out_of_range(self));
                }
                let f = if negative { -f } else { f };
                Ok(ValueExpr::Float(if f == 0.0 { 0.0 } else { f }))
            }
            _ => {
                self.pos = at;
                Err(self.error(&["number"]))
            }
        }
    }

    fn primary(&mut self) -> PResult<ValueExpr> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.peek() {
                    Tok::Int(_) | Tok::Decimal(_) => self.number(true),
                    _ => Err(self.error(&["number"])),
                }
            }
            Tok::Int(_) | Tok::Decimal(_) => self.number(false),
            Tok::Str(s) => {
                self.bump();
                Ok(ValueExpr::Str(s))
            }
            Tok::LParen => {
                self.bump();
                if let Some(q) = self.try_query_then_rparen() {
                    return Ok(ValueExpr::Subquery(Box::new(q)));
                }
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Word(w) => self.word_primary(&w),
            _ => Err(self.error(&["expression"])),
        }
    }

    fn word_primary(&mut self, w: &str) -> PResult<ValueExpr> {
        let upper = w.to_ascii_uppercase();
        match upper.as_str() {
            "NULL" => {
                self.bump();
                Ok(ValueExpr::Null)
            }
            "TRUE" => {
                self.bump();
                Ok(ValueExpr::Bool(true))
            }
            "FALSE" => {
                self.bump();
                Ok(ValueExpr::Bool(false))
            }
            "EXISTS" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let q = self.query()?;
                self.expect(&Tok::RParen)?;
                Ok(ValueExpr::Exists(Box::new(q)))
            }
            "CASE" => {
                self.bump();
                self.expect_kw("WHEN")?;
                let when = self.expr()?;
                self.expect_kw("THEN")?;
                let then = self.expr()?;
                self.expect_kw("ELSE")?;
                let otherwise = self.expr()?;
                self.eat_kw("END");
                Ok(ValueExpr::Case {
                    when: Box::new(when),
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                })
            }
            "CAST" => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let e = self.expr()?;
                self.expect_kw("AS")?;
                let to = DataType::ALL
                    .into_iter()
                    .find(|d| self.at_kw(d.name()))
                    .ok_or_else(|| self.error(&["string", "numeric", "boolean"]))?;
                self.bump();
                self.expect(&Tok::RParen)?;
                Ok(ValueExpr::Cast {
                    expr: Box::new(e),
                    to,
                })
            }
            _ => {
                if let Some(func) = Func::from_name(w) {
                    self.bump();
                    return self.func_call(func);
                }
                Ok(ValueExpr::Column(self.column_ref()?))
            }
        }
    }

    fn func_call(&mut self, func: Func) -> PResult<ValueExpr> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            let sep_from = func == Func::Substring && self.eat_kw("FROM");
            if sep_from {
                args.push(self.expr()?);
            } else {
                while self.eat(&Tok::Comma) {
                    args.push(self.expr()?);
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(ValueExpr::Func { func, args })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(q: &Query) -> &Select {
        q.as_select().unwrap()
    }

    #[test]
    fn demo_query() {
        let q = parse("SELECT t.b FROM t").unwrap();
        let s = sel(&q);
        assert_eq!(s.items, SelectList::Items(vec![ValueExpr::col("t", "b")]));
        assert_eq!(s.from, Some(vec![TableRef::Table("t".into())]));
    }

    #[test]
    fn star_and_where() {
        let q = parse("SELECT * FROM T WHERE T.a AND T.b").unwrap();
        let s = sel(&q);
        assert_eq!(s.items, SelectList::Star);
        assert_eq!(
            s.where_clause,
            Some(ValueExpr::logical(
                LogicalOp::And,
                ValueExpr::col("T", "a"),
                ValueExpr::col("T", "b")
            ))
        );
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a OR b AND c").unwrap();
        assert_eq!(
            e,
            ValueExpr::logical(
                LogicalOp::Or,
                ValueExpr::Column(ColumnRef::bare("a")),
                ValueExpr::logical(
                    LogicalOp::And,
                    ValueExpr::Column(ColumnRef::bare("b")),
                    ValueExpr::Column(ColumnRef::bare("c"))
                )
            )
        );
        let e = parse_expr("1 + 2 * 3").unwrap();
        assert_eq!(
            e,
            ValueExpr::arith(
                ArithOp::Add,
                ValueExpr::Int(1),
                ValueExpr::arith(ArithOp::Mul, ValueExpr::Int(2), ValueExpr::Int(3))
            )
        );
        let e = parse_expr("NOT a AND b").unwrap();
        assert!(matches!(e, ValueExpr::Logical { op: LogicalOp::And, .. }));
        let e = parse_expr("a XOR b OR c").unwrap();
        assert!(matches!(e, ValueExpr::Logical { op: LogicalOp::Or, .. }));
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_expr("-12").unwrap(), ValueExpr::Int(-12));
        assert_eq!(
            parse_expr("-9223372036854775808").unwrap(),
            ValueExpr::Int(i64::MIN)
        );
        assert!(parse_expr("9223372036854775808").is_err());
        assert!(parse_expr("-a").is_err());
    }

    #[test]
    fn published_queries_parse() {
        for q in [
            "SELECT MOD('-12',-4);",
            "SELECT 'Hello'||NULL;",
            "SELECT t1.c0, t2.c0 FROM t1, t2 RIGHT OUTER JOIN t0 ON 0 WHERE (NOT ((t2.c0 IS FALSE)!= ((t1.c0))))",
            "SELECT * FROM a UNION SELECT * FROM b",
            "SELECT MAX t.b FROM t",
            "SELECT COUNT(*) FROM t GROUP BY t.a HAVING t.a > 1",
            "SELECT x BETWEEN 1 AND 2 FROM t",
            "SELECT * FROM t WHERE t.a IN (SELECT u.a FROM u) AND EXISTS (SELECT * FROM u)",
            "SELECT SUBSTRING('hello' FROM 2), CAST(1 AS string), CASE WHEN 0 THEN 'a' ELSE 'b' END",
        ] {
            parse(q).unwrap_or_else(|e| panic!("{q}: {e}"));
        }
    }

    #[test]
    fn aggregate_surface_forms_agree() {
        assert_eq!(
            parse("SELECT MAX t.b FROM t").unwrap(),
            parse("SELECT MAX(t.b) FROM t").unwrap()
        );
        let q = parse("SELECT COUNT(*) FROM t").unwrap();
        assert_eq!(sel(&q).items, SelectList::Star);
    }

    #[test]
    fn syntax_error_has_offset_and_expected() {
        let e = parse("SELECT FROM t").unwrap_err();
        assert_eq!(e.offset, 7);
        assert!(!e.expected.is_empty());
        let e = parse("SELECT * FROM t WHERE").unwrap_err();
        assert_eq!(e.offset, 21);
    }

    #[test]
    fn in_list_versus_subquery() {
        let e = parse_expr("a IN (1, 2)").unwrap();
        assert!(matches!(e, ValueExpr::InList { .. }));
        let e = parse_expr("a NOT IN (SELECT t.a FROM t)").unwrap();
        assert!(matches!(e, ValueExpr::InSubquery { negated: true, .. }));
        let e = parse_expr("((SELECT t.a FROM t)) + 1").unwrap();
        assert!(matches!(e, ValueExpr::Arith { .. }));
    }
}
