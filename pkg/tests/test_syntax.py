import random

import pytest

from elas.randgen import random_formula
from elas.syntax import (
    And, ArityError, Assign, Bot, Eq, FreshnessError, Iff, Implies, Knows,
    Name, Not, Or, ParseError, Pred, Signature, SubstitutionError, Top, Var,
    all_vars, formula_signature, free_vars, is_admissible, is_el_fragment,
    kh, knows_who, node_count, parse_formula, print_formula, reletter,
    subformulas, substitute,
)

x, y, z = Var("x"), Var("y"), Var("z")
a, b, c = Name("a"), Name("b"), Name("c")


def Px(*args):
    return Pred("P", tuple(args))


class TestParse:
    def test_assignment_and_dual_knowledge(self):
        phi = parse_formula("[?x := a] Kh{a} P(?x)")
        assert phi == Assign("x", a, Not(Knows(a, Not(Px(x)))))

    def test_reflexive_equality_atom(self):
        assert parse_formula("a = a") == Eq(a, a)

    def test_arity_clash(self):
        with pytest.raises(ArityError):
            parse_formula("P(a) & P(a, b)")

    def test_position_reported(self):
        with pytest.raises(ParseError) as err:
            parse_formula("P(a")
        assert err.value.pos == 3

    def test_name_in_binder_position(self):
        with pytest.raises(ParseError, match="variable"):
            parse_formula("[a := b] P(a)")

    def test_diamond_desugars(self):
        phi = parse_formula("<?x := b> P(?x)")
        assert phi == Not(Assign("x", b, Not(Px(x))))

    def test_precedence(self):
        phi = parse_formula("~P(a) & Q(b) | R -> S <-> T")
        assert isinstance(phi, Iff)
        assert isinstance(phi.lhs, Implies)
        assert isinstance(phi.lhs.lhs, Or)
        assert phi.lhs.lhs.lhs == And(Not(Pred("P", (a,))), Pred("Q", (b,)))

    def test_implies_right_associative(self):
        phi = parse_formula("P -> Q -> R")
        assert phi == Implies(Pred("P", ()), Implies(Pred("Q", ()), Pred("R", ())))

    def test_iff_left_associative(self):
        phi = parse_formula("P <-> Q <-> R")
        assert phi == Iff(Iff(Pred("P", ()), Pred("Q", ())), Pred("R", ()))

    def test_equality_binds_under_knowledge(self):
        assert parse_formula("K{a} ?x = ?y") == Knows(a, Eq(x, y))

    def test_zero_arity_predicate(self):
        assert parse_formula("Rain") == Pred("Rain", ())

    def test_true_false(self):
        assert parse_formula("true & false") == And(Top(), Bot())

    def test_signature_check(self):
        sig = Signature({"P": 2}, frozenset({"a"}))
        with pytest.raises(ArityError):
            parse_formula("P(a)", signature=sig)
        with pytest.raises(ParseError):
            parse_formula("Q(a)", signature=sig)
        with pytest.raises(ParseError):
            parse_formula("P(a, zzz)", signature=sig)

    def test_predicate_named_like_operator(self):
        assert parse_formula("K(a)") == Pred("K", (a,))
        assert parse_formula("Kh(a)") == Pred("Kh", (a,))


class TestPrint:
    def test_round_trip_example(self):
        text = "K{?x} (P(?x) -> P(?x))"
        assert parse_formula(print_formula(parse_formula(text))) == parse_formula(text)

    def test_knowing_who_rendering(self):
        phi = Assign("x", b, Knows(a, Eq(x, b)))
        assert print_formula(phi) == "[?x := b] K{a} (?x = b)"

    def test_dual_resugars(self):
        assert print_formula(Not(Knows(a, Not(Px(x))))) == "Kh{a} P(?x)"
        assert print_formula(Not(Assign("x", b, Not(Px(x))))) == "<?x := b> P(?x)"

    def test_round_trip_random(self):
        rng = random.Random(101)
        for _ in range(600):
            phi = random_formula(rng, ("x", "y", "z"), ("a", "b"),
                                 {"P": 1, "Q": 2, "R": 0}, depth=4)
            assert parse_formula(print_formula(phi)) == phi


class TestFreeVars:
    def test_binder_term_counts(self):
        assert free_vars(parse_formula("[?x := ?y] P(?x, ?z)")) == {"y", "z"}

    def test_self_assignment_term_is_free(self):
        assert free_vars(parse_formula("[?x := ?x] P(?x)")) == {"x"}

    def test_no_variables(self):
        assert free_vars(parse_formula("K{a} P(b)")) == frozenset()

    def test_coherence_with_substitution(self):
        rng = random.Random(77)
        checked = 0
        while checked < 200:
            phi = random_formula(rng, ("x", "y", "z"), ("a",),
                                 {"P": 1}, depth=3)
            if "x" not in free_vars(phi) or not is_admissible(phi, "y", "x"):
                continue
            assert free_vars(substitute(phi, "y", "x")) == \
                (free_vars(phi) - {"x"}) | {"y"}
            checked += 1


class TestSubstitute:
    def test_no_binders(self):
        assert substitute(parse_formula("K{?x} P(?x)"), "y", "x") == \
            parse_formula("K{?y} P(?y)")

    def test_capture_rejected(self):
        with pytest.raises(SubstitutionError, match=r"\?y"):
            substitute(parse_formula("[?y := c] P(?x)"), "y", "x")

    def test_only_free_term_position_replaced(self):
        assert substitute(parse_formula("[?x := ?x] P(?x)"), "y", "x") == \
            parse_formula("[?x := ?y] P(?x)")

    def test_admissibility(self):
        assert not is_admissible(parse_formula("[?y := c] P(?x)"), "y", "x")
        assert is_admissible(parse_formula("[?z := a] P(?x)"), "y", "x")
        rng = random.Random(5)
        for _ in range(100):
            phi = random_formula(rng, ("x", "y"), ("a",), {"P": 1}, depth=3)
            assert is_admissible(phi, "x", "x")
            assert substitute(phi, "x", "x") == phi

    def test_capture_only_matters_for_free_occurrences(self):
        # ?x under its own binder is not free, so no capture can happen
        assert is_admissible(parse_formula("[?y := c] [?x := a] P(?x)"), "y", "x")


class TestReletter:
    def test_body_renamed(self):
        assert reletter(parse_formula("[?x := a] K{?x} P(?x)"), "z") == \
            parse_formula("[?z := a] K{?z} P(?z)")

    def test_variable_not_free_in_body(self):
        assert reletter(parse_formula("[?x := a] P(b)"), "z") == \
            parse_formula("[?z := a] P(b)")

    def test_freshness_enforced(self):
        with pytest.raises(FreshnessError):
            reletter(parse_formula("[?x := ?z] P(?x)"), "z")
        with pytest.raises(ValueError):
            reletter(parse_formula("P(a)"), "z")

    def test_preserves_free_variables(self):
        rng = random.Random(13)
        checked = 0
        while checked < 150:
            phi = random_formula(rng, ("x", "y"), ("a",), {"P": 1}, depth=3)
            if not isinstance(phi, Assign) or "w" in all_vars(phi):
                continue
            assert free_vars(reletter(phi, "w")) == free_vars(phi)
            checked += 1


class TestKnowsWho:
    def test_shape(self):
        assert print_formula(knows_who(a, "b")) == "[?w0 := b] K{a} (?w0 = b)"

    def test_self_naming(self):
        assert print_formula(knows_who(a, "a")) == "[?w0 := a] K{a} (?w0 = a)"

    def test_closed(self):
        assert free_vars(knows_who(a, "b")) == frozenset()

    def test_fresh_variable_avoids_collision(self):
        phi = knows_who(Var("w0"), "b")
        assert phi.var == "w1"


class TestElFragment:
    def test_plain_knowledge(self):
        assert is_el_fragment(parse_formula("K{a} P(?x)"))

    def test_binder(self):
        assert not is_el_fragment(parse_formula("[?x := a] P(?x)"))

    def test_separating_formula(self):
        assert not is_el_fragment(parse_formula("[?x := a] Kh{a} P(?x)"))


class TestAuxiliary:
    def test_node_count(self):
        assert node_count(parse_formula("[?x := a] Kh{a} P(?x)")) == 8
        assert node_count(parse_formula("a = a")) == 3
        assert node_count(Top()) == 1

    def test_signature_extraction(self):
        sig = formula_signature(parse_formula("[?x := a] (K{b} P(?x) & Q)"))
        assert sig.predicates == {"P": 1, "Q": 0}
        assert sig.names == {"a", "b"}
        assert sig.variables == frozenset()

    def test_no_sugar_constructors_exist(self):
        phi = parse_formula("Kh{a} <?x := b> P(?x)")
        kinds = {type(sub).__name__ for sub in subformulas(phi)}
        assert kinds <= {"Not", "Knows", "Assign", "Pred"}

    def test_kh_helper(self):
        assert kh(a, Px(x)) == parse_formula("Kh{a} P(?x)")
