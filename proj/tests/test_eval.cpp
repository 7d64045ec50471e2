#include "fflm/error.hpp"
#include "fflm/eval.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace fflm;
using namespace testutil;

static const double k_inf = std::numeric_limits<double>::infinity();

TEST_CASE("balanced accuracy hand values") {
    CHECK(balanced_accuracy(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 0}) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(balanced_accuracy(std::vector<int>{1, 0, 1, 0}, std::vector<int>{1, 0, 1, 0}) == 1.0);
    CHECK(balanced_accuracy(std::vector<int>{1, 0}, std::vector<int>{1, 1}) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("balanced accuracy input validation") {
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{1, 0, 1}, std::vector<int>{1, 0}),
                     error_kind::length_mismatch);
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{}, std::vector<int>{}),
                     error_kind::empty_input);
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{1, 1}, std::vector<int>{1, 0}),
                     error_kind::single_class_labels);
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{0, 0}, std::vector<int>{1, 0}),
                     error_kind::single_class_labels);
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{1, 2}, std::vector<int>{1, 0}),
                     error_kind::protocol_violation);
    CHECK_FAILS_WITH(balanced_accuracy(std::vector<int>{1, 0}, std::vector<int>{-1, 0}),
                     error_kind::protocol_violation);
}

TEST_CASE("threshold selection hand values") {
    const auto perfect = select_threshold(std::vector<double>{0.1, 0.2, 0.3, 0.4},
                                          std::vector<int>{0, 0, 1, 1});
    CHECK(perfect.threshold == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(perfect.balanced_acc == 1.0);

    const auto anti = select_threshold(std::vector<double>{0.4, 0.3, 0.2, 0.1},
                                       std::vector<int>{0, 0, 1, 1});
    CHECK(anti.threshold == -k_inf);
    CHECK(anti.balanced_acc == 0.5);

    const auto flat = select_threshold(std::vector<double>{0.7, 0.7, 0.7, 0.7},
                                       std::vector<int>{1, 0, 1, 0});
    CHECK(flat.threshold == -k_inf);
    CHECK(flat.balanced_acc == 0.5);
}

TEST_CASE("threshold selection matches the brute-force oracle exactly") {
    std::mt19937_64 rng(0xacc355ULL);
    for (int round = 0; round < 200; round++) {
        const size_t n = 2 + rng() % 199;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        const bool tie_heavy = round % 3 == 0;
        for (size_t i = 0; i < n; i++) {
            scores[i] = tie_heavy ? static_cast<double>(rng() % 9) / 8.0 : unit_double(rng);
            labels[i] = static_cast<int>(rng() % 2);
        }
        labels[0] = 0;
        labels[1] = 1;

        const auto got = select_threshold(scores, labels);
        std::vector<int> int_labels(labels.begin(), labels.end());
        const auto want = oracle::select_threshold(scores, int_labels);
        CHECK(got.threshold == want.threshold);
        CHECK(got.balanced_acc == want.balanced_acc);
    }
}

TEST_CASE("shifting every score shifts the threshold and keeps the accuracy") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 50; round++) {
        const size_t n = 4 + rng() % 60;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (size_t i = 0; i < n; i++) {
            scores[i] = unit_double(rng);
            labels[i] = static_cast<int>(rng() % 2);
        }
        labels[0] = 0;
        labels[1] = 1;

        const auto base = select_threshold(scores, labels);
        const double shift = 3.7;
        std::vector<double> shifted = scores;
        for (auto & s : shifted) {
            s += shift;
        }
        const auto moved = select_threshold(shifted, labels);
        CHECK(moved.balanced_acc == base.balanced_acc);
        if (std::isfinite(base.threshold)) {
            CHECK(moved.threshold == doctest::Approx(base.threshold + shift).epsilon(1e-9));
        } else {
            CHECK(moved.threshold == base.threshold);
        }
    }
}

TEST_CASE("threshold selection input validation") {
    CHECK_FAILS_WITH(select_threshold(std::vector<double>{1.0}, std::vector<int>{1, 0}),
                     error_kind::length_mismatch);
    CHECK_FAILS_WITH(select_threshold(std::vector<double>{}, std::vector<int>{}),
                     error_kind::empty_input);
    CHECK_FAILS_WITH(select_threshold(std::vector<double>{1.0, 2.0}, std::vector<int>{1, 1}),
                     error_kind::single_class_labels);
    CHECK_FAILS_WITH(
        select_threshold(std::vector<double>{1.0, std::nan("")}, std::vector<int>{1, 0}),
        error_kind::protocol_violation);
}

namespace {

std::vector<delta_triple> cond_separated_deltas(std::mt19937_64 & rng, std::vector<int> & labels,
                                                size_t n) {
    std::vector<delta_triple> deltas(n);
    labels.resize(n);
    for (size_t i = 0; i < n; i++) {
        labels[i] = static_cast<int>(rng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    for (size_t i = 0; i < n; i++) {
        deltas[i].d_y_prior = 4.0 * unit_double(rng) - 2.0; // label-independent noise
        deltas[i].d_x_prior = 4.0 * unit_double(rng) - 2.0;
        deltas[i].d_y_cond = labels[i] == 1 ? 0.5 + 0.2 * unit_double(rng)
                                            : -0.5 - 0.2 * unit_double(rng);
    }
    return deltas;
}

} // namespace

TEST_CASE("weight grid search") {
    std::mt19937_64 rng(2024);
    std::vector<int> labels;
    const auto deltas = cond_separated_deltas(rng, labels, 80);

    const auto result = grid_search_weights(deltas, labels, 0.1);
    CHECK(result.combos_evaluated == 66);
    CHECK(result.weights.alpha == 0.0);
    CHECK(result.weights.beta == 0.0);
    CHECK(result.weights.delta == 1.0);
    CHECK(result.balanced_acc == 1.0);

    // never worse than any pure single-delta projection
    for (int axis = 0; axis < 3; axis++) {
        std::vector<double> column(deltas.size());
        for (size_t i = 0; i < deltas.size(); i++) {
            column[i] = axis == 0   ? deltas[i].d_y_prior
                        : axis == 1 ? deltas[i].d_x_prior
                                    : deltas[i].d_y_cond;
        }
        CHECK(result.balanced_acc >= select_threshold(column, labels).balanced_acc);
    }
}

TEST_CASE("grid search step handling") {
    std::mt19937_64 rng(7);
    std::vector<int> labels;
    const auto deltas = cond_separated_deltas(rng, labels, 20);

    CHECK(grid_search_weights(deltas, labels, 0.25).combos_evaluated == 15);
    CHECK(grid_search_weights(deltas, labels, 0.5).combos_evaluated == 6);
    CHECK(grid_search_weights(deltas, labels, 1.0).combos_evaluated == 3);

    CHECK_FAILS_WITH(grid_search_weights(deltas, labels, 0.3), error_kind::config_error);
    CHECK_FAILS_WITH(grid_search_weights(deltas, labels, 0.0), error_kind::config_error);
    CHECK_FAILS_WITH(grid_search_weights(deltas, labels, -0.1), error_kind::config_error);
    CHECK_FAILS_WITH(grid_search_weights(deltas, labels, 2.0), error_kind::config_error);
}

TEST_CASE("grid search input validation") {
    std::vector<delta_triple> deltas(4);
    CHECK_FAILS_WITH(grid_search_weights(deltas, std::vector<int>{1, 0}, 0.1),
                     error_kind::length_mismatch);
    CHECK_FAILS_WITH(grid_search_weights(std::vector<delta_triple>{}, std::vector<int>{}, 0.1),
                     error_kind::empty_input);
    CHECK_FAILS_WITH(grid_search_weights(deltas, std::vector<int>{1, 1, 1, 1}, 0.1),
                     error_kind::single_class_labels);
}

TEST_CASE("grid search ties resolve to the smallest weights") {
    // one positive and one negative example, separable by every column: all 66
    // combos reach accuracy 1.0, so the first enumerated combo (0, 0, 1) wins
    std::vector<delta_triple> deltas = {{1.0, 1.0, 1.0}, {-1.0, -1.0, -1.0}};
    const std::vector<int> labels = {1, 0};
    const auto result = grid_search_weights(deltas, labels, 0.1);
    CHECK(result.balanced_acc == 1.0);
    CHECK(result.weights.alpha == 0.0);
    CHECK(result.weights.beta == 0.0);
    CHECK(result.weights.delta == 1.0);
}

TEST_CASE("correlation hand values") {
    const std::vector<double> x = {1, 2, 3};
    CHECK(correlate(x, std::vector<double>{2, 4, 6}, correlation_kind::pearson) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(correlate(x, std::vector<double>{3, 1, 2}, correlation_kind::spearman) ==
          doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(correlate(x, std::vector<double>{3, 1, 2}, correlation_kind::kendall) ==
          doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("correlations match the definition-level oracle") {
    std::mt19937_64 rng(0xc0ffeeULL);
    for (int round = 0; round < 100; round++) {
        const size_t n = 8 + rng() % 57;
        const bool tie_heavy = round % 2 == 0;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; i++) {
            x[i] = tie_heavy ? static_cast<double>(rng() % 4) : unit_double(rng);
            y[i] = tie_heavy ? static_cast<double>(rng() % 4) : unit_double(rng);
        }
        // keep at least two distinct values in each input
        x[0] = -1.0;
        x[1] = 5.0;
        y[0] = -1.0;
        y[1] = 5.0;

        CHECK(correlate(x, y, correlation_kind::pearson) ==
              doctest::Approx(oracle::pearson(x, y)).epsilon(1e-9));
        CHECK(correlate(x, y, correlation_kind::spearman) ==
              doctest::Approx(oracle::spearman(x, y)).epsilon(1e-9));
        CHECK(correlate(x, y, correlation_kind::kendall) ==
              doctest::Approx(oracle::kendall_tau_b(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("rank correlations are invariant under strictly increasing transforms") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 50; round++) {
        const size_t n = 6 + rng() % 30;
        std::vector<double> x(n), y(n);
        for (size_t i = 0; i < n; i++) {
            x[i] = static_cast<double>(rng() % 9) / 2.0; // ties included
            y[i] = static_cast<double>(rng() % 9) / 2.0;
        }
        x[0] = 0.0;
        x[1] = 4.0;
        y[0] = 0.0;
        y[1] = 4.0;

        std::vector<double> ex(n);
        for (size_t i = 0; i < n; i++) {
            ex[i] = std::exp(x[i]);
        }
        CHECK(correlate(ex, y, correlation_kind::spearman) ==
              correlate(x, y, correlation_kind::spearman));
        CHECK(correlate(ex, y, correlation_kind::kendall) ==
              correlate(x, y, correlation_kind::kendall));
    }
}

TEST_CASE("correlation input validation") {
    const std::vector<double> x = {1, 2, 3};
    CHECK_FAILS_WITH(correlate(x, std::vector<double>{1, 2}, correlation_kind::pearson),
                     error_kind::length_mismatch);
    CHECK_FAILS_WITH(
        correlate(std::vector<double>{1.0}, std::vector<double>{1.0}, correlation_kind::pearson),
        error_kind::degenerate_input);
    CHECK_FAILS_WITH(correlate(std::vector<double>{2, 2, 2}, x, correlation_kind::pearson),
                     error_kind::degenerate_input);
    CHECK_FAILS_WITH(correlate(std::vector<double>{2, 2, 2}, x, correlation_kind::spearman),
                     error_kind::degenerate_input);
    CHECK_FAILS_WITH(correlate(std::vector<double>{2, 2, 2}, x, correlation_kind::kendall),
                     error_kind::degenerate_input);
    CHECK_FAILS_WITH(
        correlate(std::vector<double>{1, 2, k_inf}, x, correlation_kind::pearson),
        error_kind::protocol_violation);
}

TEST_CASE("summary-level report composes the three coefficients") {
    const std::vector<double> scores = {0.2, 0.5, 0.1, 0.9, 0.4};
    const std::vector<double> ratings = {2.0, 3.5, 1.0, 5.0, 3.0};

    const auto report = summary_level_report(scores, ratings);
    CHECK(report.level == correlation_level::summary);
    CHECK(report.n == 5);
    CHECK(report.pearson == correlate(scores, ratings, correlation_kind::pearson));
    CHECK(report.spearman == correlate(scores, ratings, correlation_kind::spearman));
    CHECK(report.kendall == correlate(scores, ratings, correlation_kind::kendall));

    const auto self = summary_level_report(scores, scores);
    CHECK(self.pearson == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.kendall == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> negated(scores.size());
    for (size_t i = 0; i < scores.size(); i++) {
        negated[i] = -scores[i];
    }
    const auto flipped = summary_level_report(scores, negated);
    CHECK(flipped.pearson == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("system-level report correlates per-system means") {
    const std::vector<double> scores = {1.0, 2.0, 5.0, 6.0};
    const std::vector<double> ratings = {10.0, 20.0, 30.0, 40.0};
    const std::vector<std::string> systems = {"a", "a", "b", "b"};

    const auto report = system_level_report(scores, ratings, systems);
    CHECK(report.level == correlation_level::system);
    CHECK(report.n == 2);
    CHECK(report.spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.pearson == doctest::Approx(1.0).epsilon(1e-12));

    // grouping is by system name, so row order cannot matter
    const std::vector<double> shuffled_scores = {5.0, 1.0, 6.0, 2.0};
    const std::vector<double> shuffled_ratings = {30.0, 10.0, 40.0, 20.0};
    const std::vector<std::string> shuffled_systems = {"b", "a", "b", "a"};
    const auto again = system_level_report(shuffled_scores, shuffled_ratings, shuffled_systems);
    CHECK(again.pearson == report.pearson);
    CHECK(again.spearman == report.spearman);
    CHECK(again.kendall == report.kendall);
}

TEST_CASE("system-level report counts systems, not examples") {
    std::vector<double> scores, ratings;
    std::vector<std::string> systems;
    std::mt19937_64 rng(16);
    for (int sys = 0; sys < 16; sys++) {
        for (int i = 0; i < 3; i++) {
            scores.push_back(static_cast<double>(sys) + unit_double(rng));
            ratings.push_back(static_cast<double>(sys) + unit_double(rng));
            systems.push_back("sys" + std::to_string(sys));
        }
    }
    const auto report = system_level_report(scores, ratings, systems);
    CHECK(report.n == 16);
}

TEST_CASE("system-level report error cases") {
    const std::vector<double> vals = {1.0, 3.0, 2.0, 2.0};

    // equal per-system score means leave pearson undefined
    CHECK_FAILS_WITH(system_level_report(vals, std::vector<double>{1, 1, 2, 2},
                                         std::vector<std::string>{"a", "a", "b", "b"}),
                     error_kind::degenerate_input);

    CHECK_FAILS_WITH(system_level_report(vals, vals,
                                         std::vector<std::string>{"a", "a", "a", "a"}),
                     error_kind::too_few_systems);

    CHECK_FAILS_WITH(system_level_report(vals, vals,
                                         std::vector<std::string>{"a", "", "b", "b"}),
                     error_kind::missing_system_id);

    CHECK_FAILS_WITH(system_level_report(vals, std::vector<double>{1, 2},
                                         std::vector<std::string>{"a", "b"}),
                     error_kind::length_mismatch);

    CHECK_FAILS_WITH(system_level_report(std::vector<double>{}, std::vector<double>{},
                                         std::vector<std::string>{}),
                     error_kind::empty_input);
}

namespace {

eval_example make_example(const std::string & id, int label,
                          std::set<std::string> tags = {}) {
    eval_example ex;
    ex.id = id;
    ex.document = "doc";
    ex.summary = "sum";
    ex.label = label;
    ex.error_types = std::move(tags);
    return ex;
}

} // namespace

TEST_CASE("error-type analysis on perfectly separated scores") {
    std::vector<eval_example> examples = {
        make_example("e1", 0, {"Sem"}), make_example("e2", 0, {"Sem"}),
        make_example("e3", 0, {"Sem"}), make_example("e4", 0, {"Sem"}),
        make_example("f1", 1),          make_example("f2", 1),
    };
    const std::vector<double> scores = {1.0, 0.5, 0.8, 0.2, 3.5, 4.0};

    error_type_params params;
    params.n_per_type = 2;
    params.repeats = 10;
    params.seed = 1;

    const auto results = error_type_analysis(examples, scores, params);
    REQUIRE(results.size() == 1);
    CHECK(results[0].type == "Sem");
    // every repeat sees 2 distinct error scores below 2 faithful ones:
    // spearman = pearson of ranks [1,2,3,4] against [1.5,1.5,3.5,3.5]
    CHECK(results[0].mean_spearman == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-9));
    CHECK(results[0].degenerate_repeats == 0);
    CHECK(results[0].tagged_total == 4);
    CHECK(results[0].multi_tagged == 0);
}

TEST_CASE("constant scores count every repeat as degenerate") {
    std::vector<eval_example> examples = {
        make_example("e1", 0, {"Disc"}), make_example("e2", 0, {"Disc"}),
        make_example("f1", 1),           make_example("f2", 1),
    };
    const std::vector<double> scores = {2.0, 2.0, 2.0, 2.0};

    error_type_params params;
    params.n_per_type = 2;
    params.repeats = 5;

    const auto results = error_type_analysis(examples, scores, params);
    REQUIRE(results.size() == 1);
    CHECK(results[0].mean_spearman == 0.0);
    CHECK(results[0].degenerate_repeats == 5);
}

TEST_CASE("error-type analysis is deterministic in the seed") {
    std::mt19937_64 rng(555);
    std::vector<eval_example> examples;
    std::vector<double> scores;
    for (int i = 0; i < 40; i++) {
        examples.push_back(make_example("e" + std::to_string(i), 0, {"CVer"}));
        scores.push_back(unit_double(rng));
    }
    for (int i = 0; i < 10; i++) {
        examples.push_back(make_example("f" + std::to_string(i), 1));
        scores.push_back(unit_double(rng) + 0.25);
    }

    error_type_params params;
    params.n_per_type = 5;
    params.repeats = 10;
    params.seed = 99;

    const auto a = error_type_analysis(examples, scores, params);
    const auto b = error_type_analysis(examples, scores, params);
    REQUIRE(a.size() == 1);
    CHECK(a[0].mean_spearman == b[0].mean_spearman);
    CHECK(a[0].degenerate_repeats == b[0].degenerate_repeats);
}

TEST_CASE("requested types are validated and auto-detection follows canonical order") {
    std::vector<eval_example> examples = {
        make_example("e1", 0, {"CVer"}), make_example("e2", 0, {"CVer"}),
        make_example("e3", 0, {"Sem", "Disc"}), make_example("e4", 0, {"Sem"}),
        make_example("e5", 0, {"Disc"}),
        make_example("f1", 1), make_example("f2", 1),
    };
    const std::vector<double> scores = {0.1, 0.2, 0.3, 0.4, 0.5, 0.8, 0.9};

    error_type_params params;
    params.n_per_type = 2;
    params.repeats = 2;

    const auto results = error_type_analysis(examples, scores, params);
    REQUIRE(results.size() == 3);
    CHECK(results[0].type == "Sem");
    CHECK(results[1].type == "Disc");
    CHECK(results[2].type == "CVer");
    CHECK(results[0].tagged_total == 2);
    CHECK(results[0].multi_tagged == 1); // e3 carries Sem and Disc
    CHECK(results[1].multi_tagged == 1);
    CHECK(results[2].multi_tagged == 0);

    params.types = {"Bogus"};
    CHECK_FAILS_WITH(error_type_analysis(examples, scores, params), error_kind::config_error);
}

TEST_CASE("error-type analysis precondition failures") {
    std::vector<eval_example> examples = {
        make_example("e1", 0, {"Sem"}),
        make_example("f1", 1),
        make_example("f2", 1),
    };
    const std::vector<double> scores = {0.1, 0.8, 0.9};

    error_type_params params;
    params.n_per_type = 2; // only 1 Sem example available
    CHECK_FAILS_WITH(error_type_analysis(examples, scores, params),
                     error_kind::insufficient_examples);

    std::vector<eval_example> no_faithful = {
        make_example("e1", 0, {"Sem"}),
        make_example("e2", 0, {"Sem"}),
    };
    params.n_per_type = 1;
    CHECK_FAILS_WITH(error_type_analysis(no_faithful, std::vector<double>{0.1, 0.2}, params),
                     error_kind::empty_faithful_pool);

    std::vector<eval_example> untagged = {
        make_example("f1", 1),
        make_example("f2", 1),
    };
    CHECK_FAILS_WITH(error_type_analysis(untagged, std::vector<double>{0.1, 0.2}, params),
                     error_kind::insufficient_examples);

    CHECK_FAILS_WITH(error_type_analysis(examples, std::vector<double>{0.1}, params),
                     error_kind::length_mismatch);

    params.n_per_type = 0;
    CHECK_FAILS_WITH(error_type_analysis(examples, scores, params), error_kind::config_error);
    params.n_per_type = 1;
    params.repeats = 0;
    CHECK_FAILS_WITH(error_type_analysis(examples, scores, params), error_kind::config_error);
}

TEST_CASE("rating-only examples cannot feed the error-type analysis") {
    eval_example rated;
    rated.id = "r1";
    rated.document = "doc";
    rated.summary = "sum";
    rated.rating = 3.0;

    std::vector<eval_example> examples = {make_example("e1", 0, {"Sem"}), rated};
    error_type_params params;
    params.n_per_type = 1;
    CHECK_FAILS_WITH(error_type_analysis(examples, std::vector<double>{0.1, 0.2}, params),
                     error_kind::mode_mismatch);
}
