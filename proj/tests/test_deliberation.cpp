#include <doctest.h>

#include <array>

#include "courtsim/deliberation.hpp"

using namespace courtsim;

namespace {

std::vector<AgentStatement> panel(const std::vector<Leaning>& leanings) {
    std::vector<AgentStatement> statements;
    for (std::size_t i = 0; i < leanings.size(); ++i) {
        AgentStatement s;
        s.agent_id = std::to_string(i + 1);
        s.role = Role::Adjudicator;
        s.round = 1;
        s.leaning = leanings[i];
        s.justification = "reasoning";
        statements.push_back(std::move(s));
    }
    return statements;
}

// Brute-force reference: counts via repeated scans, independent of the
// implementation's tallying.
struct OracleResult {
    double ratio;
    bool tie;
    Leaning modal;
    bool consensus;
};

OracleResult consensus_oracle(const std::vector<Leaning>& leanings, double threshold,
                              bool strict) {
    auto count_of = [&](Leaning target) {
        int n = 0;
        for (Leaning l : leanings) {
            if (l == target) ++n;
        }
        return n;
    };
    std::array<Leaning, 3> all = {Leaning::Guilty, Leaning::NotGuilty, Leaning::Undecided};
    int best = 0;
    for (Leaning l : all) best = std::max(best, count_of(l));
    int winners = 0;
    Leaning modal = Leaning::Undecided;
    for (Leaning l : all) {
        if (count_of(l) == best) {
            ++winners;
            modal = l;
        }
    }
    OracleResult r{};
    r.ratio = static_cast<double>(best) / static_cast<double>(leanings.size());
    r.tie = winners > 1;
    r.modal = modal;
    bool meets = strict ? r.ratio > threshold : r.ratio >= threshold;
    r.consensus = !r.tie && modal != Leaning::Undecided && meets;
    return r;
}

}  // namespace

TEST_CASE("check_consensus on the canonical five-member panels") {
    using L = Leaning;

    auto unanimous = check_consensus(panel({L::Guilty, L::Guilty, L::Guilty, L::Guilty,
                                            L::Guilty}),
                                     0.80, ThresholdRule::GreaterOrEqual);
    CHECK(unanimous.agreement_ratio == doctest::Approx(1.0));
    CHECK(unanimous.modal == L::Guilty);
    CHECK(unanimous.consensus);

    auto four_one = check_consensus(panel({L::Guilty, L::Guilty, L::Guilty, L::Guilty,
                                           L::NotGuilty}),
                                    0.80, ThresholdRule::GreaterOrEqual);
    CHECK(four_one.agreement_ratio == doctest::Approx(0.80));
    CHECK(four_one.modal == L::Guilty);
    CHECK(four_one.consensus);

    // The strict rule turns the same 0.80 panel into no consensus.
    auto strict = check_consensus(panel({L::Guilty, L::Guilty, L::Guilty, L::Guilty,
                                         L::NotGuilty}),
                                  0.80, ThresholdRule::Greater);
    CHECK(strict.agreement_ratio == doctest::Approx(0.80));
    CHECK_FALSE(strict.consensus);

    auto tied = check_consensus(panel({L::Guilty, L::Guilty, L::NotGuilty, L::NotGuilty,
                                       L::Undecided}),
                                0.80, ThresholdRule::GreaterOrEqual);
    CHECK(tied.agreement_ratio == doctest::Approx(0.40));
    CHECK_FALSE(tied.modal.has_value());  // tie
    CHECK_FALSE(tied.consensus);
}

TEST_CASE("a unanimous Undecided panel never reaches consensus") {
    using L = Leaning;
    auto all_undecided = check_consensus(panel({L::Undecided, L::Undecided, L::Undecided}),
                                         0.5, ThresholdRule::GreaterOrEqual);
    CHECK(all_undecided.agreement_ratio == doctest::Approx(1.0));
    CHECK(all_undecided.modal == L::Undecided);
    CHECK_FALSE(all_undecided.consensus);
}

TEST_CASE("statements without a leaning count as Undecided") {
    std::vector<AgentStatement> statements = panel({Leaning::Guilty, Leaning::Guilty});
    AgentStatement blank;
    blank.agent_id = "3";
    blank.role = Role::Adjudicator;
    statements.push_back(blank);  // no leaning set
    auto result = check_consensus(statements, 0.5, ThresholdRule::GreaterOrEqual);
    CHECK(result.agreement_ratio == doctest::Approx(2.0 / 3.0));
    CHECK(result.modal == Leaning::Guilty);
}

TEST_CASE("check_consensus equals the exhaustive oracle for every panel up to six") {
    std::array<Leaning, 3> values = {Leaning::Guilty, Leaning::NotGuilty, Leaning::Undecided};
    for (int n = 1; n <= 6; ++n) {
        std::size_t total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<Leaning> leanings;
            std::size_t rest = code;
            for (int i = 0; i < n; ++i) {
                leanings.push_back(values[rest % 3]);
                rest /= 3;
            }
            auto statements = panel(leanings);
            for (double threshold : {0.5, 0.8, 1.0}) {
                for (bool strict : {false, true}) {
                    auto rule = strict ? ThresholdRule::Greater
                                       : ThresholdRule::GreaterOrEqual;
                    auto got = check_consensus(statements, threshold, rule);
                    auto want = consensus_oracle(leanings, threshold, strict);
                    REQUIRE(got.agreement_ratio == want.ratio);
                    REQUIRE(got.modal.has_value() == !want.tie);
                    if (!want.tie) REQUIRE(*got.modal == want.modal);
                    REQUIRE(got.consensus == want.consensus);
                }
            }
        }
    }
}

TEST_CASE("declare_hung copies the final round's modal fraction") {
    SimulationConfig config;
    config.max_rounds = 5;

    DeliberationTranscript transcript;
    using L = Leaning;
    for (int r = 0; r < 5; ++r) {
        transcript.rounds.push_back(panel({L::Guilty, L::Guilty, L::Guilty, L::NotGuilty,
                                           L::NotGuilty}));
    }
    Verdict verdict = declare_hung(transcript, config);
    CHECK(verdict.outcome == Outcome::Hung);
    CHECK(verdict.final_agreement_ratio == doctest::Approx(0.60));
    CHECK(verdict.rounds_used == 5);
}

TEST_CASE("declare_hung rejects premature or contradictory calls") {
    SimulationConfig config;
    config.max_rounds = 5;

    DeliberationTranscript early;
    early.rounds.push_back(panel({Leaning::Guilty, Leaning::NotGuilty}));
    CHECK_THROWS_AS(declare_hung(early, config), std::logic_error);

    // Last round actually reached consensus: hung declaration is a logic error.
    DeliberationTranscript done;
    for (int r = 0; r < 5; ++r) {
        done.rounds.push_back(panel(std::vector<Leaning>(5, Leaning::Guilty)));
    }
    CHECK_THROWS_AS(declare_hung(done, config), std::logic_error);
}

TEST_CASE("an all-Undecided final round records its modal ratio on the hung verdict") {
    SimulationConfig config;
    config.max_rounds = 2;
    DeliberationTranscript transcript;
    transcript.rounds.push_back(panel(std::vector<Leaning>(5, Leaning::Undecided)));
    transcript.rounds.push_back(panel(std::vector<Leaning>(5, Leaning::Undecided)));
    Verdict verdict = declare_hung(transcript, config);
    CHECK(verdict.outcome == Outcome::Hung);
    CHECK(verdict.final_agreement_ratio == doctest::Approx(1.0));
}
