#include <doctest.h>

#include <filesystem>
#include <set>

#include "ferbench/common.hpp"
#include "ferbench/pipeline/class_map.hpp"
#include "ferbench/pipeline/demographics.hpp"
#include "ferbench/pipeline/exclusion.hpp"
#include "ferbench/pipeline/frame_sampling.hpp"
#include "ferbench/rng.hpp"

using namespace ferbench;

namespace {

std::vector<std::int64_t> indices(const std::vector<SampledFrame>& frames) {
    std::vector<std::int64_t> out;
    for (const auto& f : frames) out.push_back(f.index);
    return out;
}

}  // namespace

TEST_CASE("uniform_five exact picks") {
    CHECK(indices(sample_frames(5, SamplingKind::uniform_five)) ==
          std::vector<std::int64_t>{0, 1, 2, 3, 4});
    CHECK(indices(sample_frames(100, SamplingKind::uniform_five)) ==
          std::vector<std::int64_t>{0, 25, 50, 74, 99});
}

TEST_CASE("neutral_plus_apex picks and tagging") {
    const auto frames = sample_frames(30, SamplingKind::neutral_plus_apex);
    CHECK(indices(frames) == std::vector<std::int64_t>{0, 22, 29});
    CHECK(frames[0].is_neutral);
    CHECK(!frames[1].is_neutral);
    CHECK(!frames[2].is_neutral);
}

TEST_CASE("uniform_five always covers both endpoints with unique indices") {
    for (std::int64_t n = 5; n <= 400; ++n) {
        const auto picks = indices(sample_frames(n, SamplingKind::uniform_five));
        REQUIRE(picks.size() == 5);
        CHECK(picks.front() == 0);
        CHECK(picks.back() == n - 1);
        for (std::size_t i = 1; i < picks.size(); ++i) CHECK(picks[i] > picks[i - 1]);
    }
}

TEST_CASE("neutral_plus_apex emits three strictly increasing indices") {
    for (std::int64_t n = 3; n <= 200; ++n) {
        const auto picks = indices(sample_frames(n, SamplingKind::neutral_plus_apex));
        REQUIRE(picks.size() == 3);
        CHECK(picks[0] == 0);
        CHECK(picks[2] == n - 1);
        CHECK(picks[0] < picks[1]);
        CHECK(picks[1] < picks[2]);
    }
}

TEST_CASE("sampling errors and passthrough") {
    CHECK(sample_frames(10, SamplingKind::passthrough).empty());
    CHECK_THROWS_AS(sample_frames(4, SamplingKind::uniform_five, "clip_a"), SamplingError);
    CHECK_THROWS_AS(sample_frames(2, SamplingKind::neutral_plus_apex, "clip_b"),
                    SamplingError);
    try {
        sample_frames(4, SamplingKind::uniform_five, "clip_a");
    } catch (const SamplingError& e) {
        CHECK(std::string(e.what()).find("clip_a") != std::string::npos);
    }
}

TEST_CASE("class map covers every shipped merge entry") {
    const ClassMap map = ClassMap::builtin();
    const std::vector<std::tuple<std::string, std::string, ExpressionLabel>> golden = {
        {"arrabbiato", "FEGA", ExpressionLabel::anger},
        {"annoyed", "Lifespan", ExpressionLabel::anger},
        {"grumpy", "Lifespan", ExpressionLabel::anger},
        {"disgusto", "FEGA", ExpressionLabel::disgust},
        {"afraid", "DDCF", ExpressionLabel::fear},
        {"afraid", "NIMH-ChEFS", ExpressionLabel::fear},
        {"afraid", "KDEF", ExpressionLabel::fear},
        {"fearful", "RaFD", ExpressionLabel::fear},
        {"paura", "FEGA", ExpressionLabel::fear},
        {"joy", "WSEFEP", ExpressionLabel::happiness},
        {"allegria", "FEGA", ExpressionLabel::happiness},
        {"amusement", "BioVidEmo", ExpressionLabel::happiness},
        {"tristezza", "FEGA", ExpressionLabel::sadness},
        {"sorpresa", "FEGA", ExpressionLabel::surprise},
        {"neutra", "FEGA", ExpressionLabel::neutral},
        {"profile", "Lifespan", ExpressionLabel::neutral},
    };
    for (const auto& [raw, dataset, expected] : golden) {
        const UnifiedClass u = map.unify(raw, dataset);
        REQUIRE(std::holds_alternative<ExpressionLabel>(u));
        CHECK(std::get<ExpressionLabel>(u) == expected);
    }
    // Identity mappings apply in any dataset.
    for (ExpressionLabel l : all_expression_labels()) {
        const UnifiedClass u = map.unify(to_string(l), "KDEF");
        REQUIRE(std::holds_alternative<ExpressionLabel>(u));
        CHECK(std::get<ExpressionLabel>(u) == l);
    }
}

TEST_CASE("class map folds case and whitespace, reports unmapped") {
    const ClassMap map = ClassMap::builtin();
    CHECK(std::get<ExpressionLabel>(map.unify("  Arrabbiato ", "FEGA")) ==
          ExpressionLabel::anger);
    const UnifiedClass u = map.unify("boredom", "MMI");
    REQUIRE(std::holds_alternative<Unmapped>(u));
    CHECK(std::get<Unmapped>(u).original == "boredom");
    // Dataset-specific merges do not leak across datasets.
    CHECK(std::holds_alternative<Unmapped>(map.unify("arrabbiato", "KDEF")));
}

TEST_CASE("class map is total over arbitrary inputs") {
    const ClassMap map = ClassMap::builtin();
    Rng rng(41);
    for (int i = 0; i < 500; ++i) {
        std::string raw;
        const int len = 1 + static_cast<int>(rng.uniform_int(12));
        for (int c = 0; c < len; ++c)
            raw += static_cast<char>('a' + rng.uniform_int(26));
        const UnifiedClass u = map.unify(raw, "FEGA");
        const bool canonical = std::holds_alternative<ExpressionLabel>(u);
        const bool unmapped = std::holds_alternative<Unmapped>(u);
        CHECK(canonical != unmapped);
    }
}

TEST_CASE("class map csv round trip equals the builtin table") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "ferbench_classmap.csv";
    ClassMap::builtin().save_csv(path);
    const ClassMap loaded = ClassMap::load_csv(path);
    CHECK(loaded.size() == ClassMap::builtin().size());
    CHECK(std::get<ExpressionLabel>(loaded.unify("profile", "Lifespan")) ==
          ExpressionLabel::neutral);
}

TEST_CASE("shipped class_map.csv matches the builtin table") {
    namespace fs = std::filesystem;
    const fs::path shipped = fs::path(FERBENCH_SOURCE_DIR) / "data" / "class_map.csv";
    REQUIRE(fs::exists(shipped));
    const ClassMap loaded = ClassMap::load_csv(shipped);
    CHECK(loaded.size() == ClassMap::builtin().size());
    CHECK(std::get<ExpressionLabel>(loaded.unify("amusement", "BioVidEmo")) ==
          ExpressionLabel::happiness);
}

TEST_CASE("demographics: median age, even count") {
    std::vector<DemographicObservation> obs;
    for (double age : {29.0, 30.0, 31.0, 45.0})
        obs.push_back({"s" + std::to_string(obs.size()), age, std::nullopt});
    const auto agg = aggregate_user_demographics(obs);
    CHECK(*agg.age_years == doctest::Approx(30.5));
    CHECK(!agg.gender.has_value());
}

TEST_CASE("demographics: gender mode and lowest-id tie break") {
    std::vector<DemographicObservation> mmf = {
        {"s1", std::nullopt, Gender::male},
        {"s2", std::nullopt, Gender::male},
        {"s3", std::nullopt, Gender::female},
    };
    CHECK(*aggregate_user_demographics(mmf).gender == Gender::male);

    std::vector<DemographicObservation> tie = {
        {"s2", std::nullopt, Gender::female},
        {"s1", std::nullopt, Gender::male},  // male sits on the lower sample_id
    };
    CHECK(*aggregate_user_demographics(tie).gender == Gender::male);
}

TEST_CASE("demographics aggregation is permutation invariant") {
    Rng rng(42);
    std::vector<DemographicObservation> obs;
    for (int i = 0; i < 17; ++i) {
        DemographicObservation o;
        o.sample_id = "s" + std::to_string(i);
        if (rng.bernoulli(0.8)) o.age_years = rng.uniform(5, 80);
        if (rng.bernoulli(0.8)) o.gender = rng.bernoulli(0.5) ? Gender::male : Gender::female;
        obs.push_back(o);
    }
    const auto ref = aggregate_user_demographics(obs);
    for (int trial = 0; trial < 20; ++trial) {
        rng.shuffle(obs);
        const auto agg = aggregate_user_demographics(obs);
        CHECK(agg.age_years == ref.age_years);
        CHECK(agg.gender == ref.gender);
    }
}

TEST_CASE("demographics: absent fields drop per-field; empty list throws") {
    std::vector<DemographicObservation> obs = {
        {"s1", std::nullopt, std::nullopt},
        {"s2", 40.0, std::nullopt},
    };
    const auto agg = aggregate_user_demographics(obs);
    CHECK(*agg.age_years == doctest::Approx(40.0));
    CHECK(!agg.gender.has_value());
    CHECK_THROWS_AS(aggregate_user_demographics({}), ContractError);
}

TEST_CASE("age group boundaries") {
    CHECK(age_group_for_years(17) == AgeGroup::child);
    CHECK(age_group_for_years(18) == AgeGroup::adult);
    CHECK(age_group_for_years(59) == AgeGroup::adult);
    CHECK(age_group_for_years(60) == AgeGroup::elderly);
    CHECK(age_group_for_years(17.9) == AgeGroup::child);  // floored first
    CHECK(age_group_for_years(59.99) == AgeGroup::adult);
    CHECK(age_group_for_years(0) == AgeGroup::child);
}

TEST_CASE("age groups partition the nonnegative reals") {
    Rng rng(43);
    for (int i = 0; i < 2000; ++i) {
        const double age = rng.uniform(0, 120);
        int hits = 0;
        if (age_group_for_years(age) == AgeGroup::child) ++hits;
        if (age_group_for_years(age) == AgeGroup::adult) ++hits;
        if (age_group_for_years(age) == AgeGroup::elderly) ++hits;
        CHECK(hits == 1);
    }
}

namespace {

SampleRecord annotated_record(const std::string& id) {
    SampleRecord r;
    r.dataset = "demo";
    r.sample_id = id;
    r.media_path = id + ".png";
    r.media_type = MediaType::image;
    r.label_raw = "happiness";
    r.label = ExpressionLabel::happiness;
    r.face_bbox = PixelBox{10, 10, 50, 50};
    r.head_pose = HeadPose::front;
    return r;
}

}  // namespace

TEST_CASE("exclusion reasons in priority order") {
    SampleRecord no_face = annotated_record("a");
    no_face.face_bbox.reset();
    no_face.head_pose.reset();  // but no_face wins
    auto out = apply_exclusion(no_face);
    CHECK(out.excluded);
    CHECK(*out.exclusion_reason == "no_face");

    SampleRecord profile = annotated_record("b");
    profile.head_pose = HeadPose::full_left;
    out = apply_exclusion(profile);
    CHECK(*out.exclusion_reason == "pose_full_or_back");

    SampleRecord no_pose = annotated_record("c");
    no_pose.head_pose.reset();
    out = apply_exclusion(no_pose);
    CHECK(*out.exclusion_reason == "pose_missing");

    SampleRecord unmapped = annotated_record("d");
    unmapped.label.reset();
    out = apply_exclusion(unmapped);
    CHECK(*out.exclusion_reason == "unmapped_label");

    out = apply_exclusion(annotated_record("e"));
    CHECK(!out.excluded);
    CHECK(!out.exclusion_reason.has_value());
}

TEST_CASE("exclusion covers every pose that triggers it") {
    for (HeadPose pose : {HeadPose::full_left, HeadPose::full_right, HeadPose::back}) {
        SampleRecord r = annotated_record("p");
        r.head_pose = pose;
        CHECK(*apply_exclusion(r).exclusion_reason == "pose_full_or_back");
    }
    for (HeadPose pose : {HeadPose::front, HeadPose::half_left, HeadPose::half_right}) {
        SampleRecord r = annotated_record("p");
        r.head_pose = pose;
        CHECK(!apply_exclusion(r).excluded);
    }
}

TEST_CASE("exclusion is idempotent and recomputes stale state") {
    Rng rng(44);
    for (int i = 0; i < 200; ++i) {
        SampleRecord r = annotated_record("s" + std::to_string(i));
        if (rng.bernoulli(0.3)) r.face_bbox.reset();
        if (rng.bernoulli(0.3)) r.head_pose.reset();
        if (rng.bernoulli(0.2)) r.head_pose = HeadPose::back;
        if (rng.bernoulli(0.3)) r.label.reset();
        if (rng.bernoulli(0.2)) {
            r.excluded = true;  // stale state from a previous run
            r.exclusion_reason = "no_face";
        }
        const SampleRecord once = apply_exclusion(r);
        const SampleRecord twice = apply_exclusion(once);
        CHECK(once == twice);
        CHECK(once.excluded == once.exclusion_reason.has_value());
    }
}
