#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sigchange/expression.hpp"

namespace sigchange {
namespace {

double eval(const std::string& text, const ChartPoint& p = ChartPoint(2.0, {3.0, -1.0})) {
  return Expression::parse(text, p.dimension())(p);
}

TEST(Expression, LiteralsAndConstants) {
  EXPECT_EQ(eval("1.5"), 1.5);
  EXPECT_EQ(eval("2e-3"), 2e-3);
  EXPECT_EQ(eval(".25"), 0.25);
  EXPECT_DOUBLE_EQ(eval("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(eval("e"), std::numbers::e);
}

TEST(Expression, Variables) {
  EXPECT_EQ(eval("t"), 2.0);
  EXPECT_EQ(eval("x1"), 3.0);
  EXPECT_EQ(eval("x2"), -1.0);
}

TEST(Expression, Precedence) {
  EXPECT_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_EQ(eval("7 - 2 - 1"), 4.0);
  EXPECT_EQ(eval("2 ^ 3 ^ 2"), 512.0);  // right associative
  EXPECT_EQ(eval("-2 ^ 2"), -4.0);      // power binds tighter than unary minus
  EXPECT_EQ(eval("2 ^ -1"), 0.5);
  EXPECT_EQ(eval("--t"), 2.0);
  EXPECT_EQ(eval("1 + t * x1 ^ 2"), 19.0);
}

TEST(Expression, Functions) {
  EXPECT_DOUBLE_EQ(eval("exp(1)"), std::numbers::e);
  EXPECT_DOUBLE_EQ(eval("ln(e)"), 1.0);
  EXPECT_DOUBLE_EQ(eval("log(e^2)"), 2.0);
  EXPECT_DOUBLE_EQ(eval("sqrt(t + 2)"), 2.0);
  EXPECT_NEAR(eval("sin(pi)"), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(eval("cos(0)"), 1.0);
  EXPECT_DOUBLE_EQ(eval("tan(x1)"), std::tan(3.0));
  EXPECT_DOUBLE_EQ(eval("1 + sin(x1)^2"), 1.0 + std::pow(std::sin(3.0), 2));
}

TEST(Expression, DomainViolationsEvaluateToNaN) {
  EXPECT_TRUE(std::isnan(eval("sqrt(x2)")));
  EXPECT_TRUE(std::isnan(eval("ln(x2)")));
}

TEST(Expression, SyntaxErrorsCarryPosition) {
  struct Case {
    const char* text;
    std::size_t position;
  };
  for (const Case& c : {Case{"1 +", 3}, Case{"(t", 2}, Case{"2 * * 3", 4}, Case{"t )", 2}, Case{"foo(1)", 0},
                        Case{"x3", 0}, Case{"x0", 0}, Case{"", 0}, Case{"1 $ 2", 2}}) {
    try {
      Expression::parse(c.text, 3);
      ADD_FAILURE() << "accepted '" << c.text << "'";
    } catch (const ExpressionError& e) {
      EXPECT_EQ(e.position(), c.position) << "'" << c.text << "': " << e.what();
    }
  }
}

TEST(Expression, ErrorsArePreconditionErrors) {
  EXPECT_THROW(Expression::parse("sqrt", 2), PreconditionError);
}

TEST(ModelFromExpressions, BuildsCanonicalMetric) {
  const MetricModel m = model_from_expressions(3, {{"1 + t^2", "0"}, {"0", "exp(x1)"}});
  const Matrix g = eval_metric(m, ChartPoint(2.0, {0.0, 5.0}));
  EXPECT_EQ(g(0, 0), -2.0);
  EXPECT_EQ(g(1, 1), 5.0);
  EXPECT_EQ(g(2, 2), 1.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(classify_signature(m, ChartPoint(-1.0, {0.0, 0.0})).signature_class, SignatureClass::Riemannian);
  EXPECT_TRUE(radical_transversality(m, ChartPoint(0.0, {0.3, 0.3})).is_transverse);
}

TEST(ModelFromExpressions, ShapeAndSymmetryAreChecked) {
  EXPECT_THROW(model_from_expressions(3, {{"1", "0"}}), PreconditionError);
  EXPECT_THROW(model_from_expressions(3, {{"1", "0"}, {"0"}}), PreconditionError);
  EXPECT_THROW(model_from_expressions(2, {{"x2"}}), ExpressionError);
  const MetricModel asym = model_from_expressions(3, {{"1", "t"}, {"0", "1"}});
  EXPECT_THROW(eval_metric(asym, ChartPoint(1.0, {0.0, 0.0})), PreconditionError);
}

}  // namespace
}  // namespace sigchange
