#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cli/config.hpp"

namespace {

using namespace dpp::cli;

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

const char* kDesign = R"(# comment
[design]
n_c = 45
n_t = 45
y_ch = 54
n_ch = 180
n_ch_e = 45

[borrowing]
method = bp
eta = 2
delta_max = 0.1

[simulation]
mode = mc
n_sims = 5000
seed = 7

[scenarios]
p_c = 0.2 0.3
)";

TEST(Config, ParsesSections) {
    const RunConfig c = parse(kDesign);
    EXPECT_EQ(c.n_c, 45);
    EXPECT_EQ(c.n_ch_e, 45);
    EXPECT_EQ(c.method, "bp");
    EXPECT_EQ(c.eta, 2.0);
    EXPECT_EQ(c.delta_max, 0.1);
    EXPECT_EQ(c.mode, "mc");
    EXPECT_EQ(c.n_sims, 5000u);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.p_c, (std::vector<double>{0.2, 0.3}));
    EXPECT_EQ(c.alpha, 0.1);
    EXPECT_EQ(c.prior_c, (Shape{0.001, 0.001}));
}

TEST(Config, RejectsUnknownKeysAndSections) {
    EXPECT_THROW(parse("[design]\nn_cc = 3\n"), ConfigError);
    EXPECT_THROW(parse("[nonsense]\nx = 1\n"), ConfigError);
    try {
        parse("[design]\nn_cc = 3\n");
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("n_cc"), std::string::npos);
    }
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(parse("[design]\nn_c = forty\n"), ConfigError);
    EXPECT_THROW(parse("[design]\nprior_c = 1\n"), ConfigError);
    EXPECT_THROW(parse("[borrowing]\nmethod = magic\n"), ConfigError);
    EXPECT_THROW(parse("[simulation]\nmode = maybe\n"), ConfigError);
    EXPECT_THROW(parse("[simulation]\nn_sims = -4\n"), ConfigError);
}

TEST(Config, EmitRoundTrips) {
    const RunConfig c = parse(kDesign);
    const std::string text = emit_config(c);
    EXPECT_EQ(parse(text), c);
    EXPECT_EQ(emit_config(parse(text)), text);
    RunConfig d;
    d.priors = {{0.5, 0.5}, {1, 1}};
    d.p_hat_c = {0.1, 0.30000000000000004};
    EXPECT_EQ(parse(emit_config(d)), d);
}

TEST(Config, OverridesByDottedKey) {
    RunConfig c = parse(kDesign);
    apply_override(c, "design.n_c=30");
    apply_override(c, "simulation.mode = exact");
    EXPECT_EQ(c.n_c, 30);
    EXPECT_EQ(c.mode, "exact");
    EXPECT_THROW(apply_override(c, "design.n_cc=30"), ConfigError);
    EXPECT_THROW(apply_override(c, "n_c=30"), ConfigError);
    EXPECT_THROW(apply_override(c, "design.n_c"), ConfigError);
}

TEST(Config, HashTracksContent) {
    RunConfig a = parse(kDesign), b = parse(kDesign);
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.seed = 8;
    EXPECT_NE(config_hash(a), config_hash(b));
    // seed does not move a calibrated tau for exact runs, but it is part of the design record
    b = a;
    b.p_c = {0.45};
    EXPECT_EQ(design_hash(a), design_hash(b));
    b.n_ch_e = 90;
    EXPECT_NE(design_hash(a), design_hash(b));
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, TypedViews) {
    const RunConfig c = parse(kDesign);
    const auto d = design_spec(c);
    EXPECT_EQ(d.n_c, 45);
    EXPECT_DOUBLE_EQ(d.policy.global_a(), 0.25);
    EXPECT_EQ(std::get<dpp::BayesianP>(d.policy.method()).eta, 2.0);
    EXPECT_DOUBLE_EQ(null_rate(c), 0.3);
    EXPECT_EQ(std::get<dpp::MonteCarlo>(evaluation(c)).n_sims, 5000u);

    const auto s = scenarios(c);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_DOUBLE_EQ(s[0].p_t, 0.2);
    EXPECT_DOUBLE_EQ(s[1].p_t, 0.4);
    EXPECT_DOUBLE_EQ(s[2].p_t, 0.3);
    EXPECT_DOUBLE_EQ(s[3].p_t, 0.5);
}

TEST(Config, HistoryFromRate) {
    RunConfig c;
    c.p_ch = 0.27;
    c.n_ch = 637;
    c.n_ch_e = 31;
    const auto h = history(c);
    EXPECT_EQ(h.responders(), 172);
    EXPECT_DOUBLE_EQ(historical_rate(c), 0.27);
}

TEST(Config, MissingFieldsAreReported) {
    RunConfig c;
    EXPECT_THROW(design_spec(c), ConfigError);
    c = parse(kDesign);
    c.n_ch.reset();
    EXPECT_THROW(design_spec(c), ConfigError);
    c = parse(kDesign);
    c.n_ch_e = 500;
    EXPECT_THROW(design_spec(c), ConfigError);
}

}  // namespace
