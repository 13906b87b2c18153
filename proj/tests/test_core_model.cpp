#include <doctest.h>

#include <filesystem>

#include "ferbench/common.hpp"
#include "ferbench/core/manifest.hpp"
#include "ferbench/core/statistics.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/io/image.hpp"
#include "ferbench/rng.hpp"

using namespace ferbench;
namespace fs = std::filesystem;

namespace {

SampleRecord base_record(const std::string& id) {
    SampleRecord r;
    r.dataset = "demo";
    r.sample_id = id;
    r.media_path = "images/" + id + ".png";
    r.media_type = MediaType::image;
    r.label_raw = "happiness";
    r.label = ExpressionLabel::happiness;
    return r;
}

SampleRecord random_record(Rng& rng, std::size_t i) {
    SampleRecord r = base_record("s" + std::to_string(i));
    if (rng.bernoulli(0.5)) {
        r.media_type = MediaType::video;
        r.frame_index = rng.uniform_int(500);
    }
    if (rng.bernoulli(0.5)) r.user_id = "u" + std::to_string(rng.uniform_int(9));
    if (rng.bernoulli(0.5)) r.age_years = rng.uniform(0, 90);
    if (rng.bernoulli(0.5)) r.gender = rng.bernoulli(0.5) ? Gender::male : Gender::female;
    if (r.age_years && rng.bernoulli(0.7)) r.age_group = age_group_for_years(*r.age_years);
    if (rng.bernoulli(0.5))
        r.head_pose = static_cast<HeadPose>(rng.uniform_int(6));
    if (rng.bernoulli(0.3)) {
        r.excluded = true;
        r.exclusion_reason = "no_face";
    }
    if (rng.bernoulli(0.6)) {
        r.face_bbox = PixelBox{rng.uniform(0, 50), rng.uniform(0, 50),
                               1 + rng.uniform(0, 60), 1 + rng.uniform(0, 60)};
        r.eye_left = PixelPoint{rng.uniform(0, 100), rng.uniform(0, 100)};
        r.eye_right = PixelPoint{rng.uniform(0, 100), rng.uniform(0, 100)};
    }
    if (rng.bernoulli(0.2)) r.label.reset();
    return r;
}

}  // namespace

TEST_CASE("exactly seven canonical labels with stable names") {
    CHECK(all_expression_labels().size() == 7);
    for (ExpressionLabel l : all_expression_labels()) {
        auto back = expression_label_from_string(to_string(l));
        REQUIRE(back.has_value());
        CHECK(*back == l);
    }
    CHECK(!expression_label_from_string("contempt").has_value());
}

TEST_CASE("record serialization round-trips field-for-field") {
    Rng rng(31);
    for (std::size_t i = 0; i < 200; ++i) {
        const SampleRecord r = random_record(rng, i);
        const SampleRecord back = parse_record(serialize_record(r));
        CHECK(back == r);
    }
}

TEST_CASE("manifest round-trips and reports parse errors with line numbers") {
    DatasetManifest m;
    m.name = "demo";
    m.provenance = Provenance::web_manual;
    Rng rng(32);
    for (std::size_t i = 0; i < 50; ++i) m.samples.push_back(random_record(rng, i));

    const DatasetManifest back = parse_manifest(serialize_manifest(m), m.provenance);
    CHECK(back == m);

    const std::string broken =
        serialize_record(base_record("ok")) + "\n{not json}\n";
    try {
        parse_manifest(broken, Provenance::lab_controlled);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("manifest file io round-trips") {
    const fs::path dir = fs::temp_directory_path() / "ferbench_manifest";
    fs::remove_all(dir);
    DatasetManifest m;
    m.name = "demo";
    m.provenance = Provenance::lab_controlled;
    m.samples = {base_record("a"), base_record("b")};
    save_manifest(dir / "demo.jsonl", m);
    CHECK(load_manifest(dir / "demo.jsonl", m.provenance) == m);
}

TEST_CASE("class_set is recomputed over non-excluded samples") {
    DatasetManifest m;
    m.name = "demo";
    m.samples = {base_record("a"), base_record("b"), base_record("c")};
    m.samples[1].label = ExpressionLabel::anger;
    m.samples[2].label = ExpressionLabel::fear;
    m.samples[2].excluded = true;
    m.samples[2].exclusion_reason = "no_face";
    CHECK(m.class_set() ==
          std::set<ExpressionLabel>{ExpressionLabel::anger, ExpressionLabel::happiness});
    CHECK(m.non_excluded_count() == 2);
}

TEST_CASE("validate_manifest accepts a consistent manifest") {
    DatasetManifest m;
    m.name = "demo";
    m.samples = {base_record("a"), base_record("b")};
    CHECK(validate_manifest(m).empty());
}

TEST_CASE("validate_manifest flags direct invariant violations") {
    DatasetManifest m;
    m.name = "demo";

    SampleRecord bad_exclusion = base_record("x1");
    bad_exclusion.excluded = true;  // reason missing
    m.samples.push_back(bad_exclusion);

    SampleRecord bad_age = base_record("x2");
    bad_age.age_years = 65;
    bad_age.age_group = AgeGroup::adult;  // inconsistent with 65
    m.samples.push_back(bad_age);

    SampleRecord bad_video = base_record("x3");
    bad_video.media_type = MediaType::video;  // frame_index missing
    m.samples.push_back(bad_video);

    SampleRecord dup = base_record("x3");
    m.samples.push_back(dup);

    const auto violations = validate_manifest(m);
    auto has = [&](const std::string& id, const std::string& rule) {
        for (const auto& v : violations)
            if (v.sample_id == id && v.rule == rule) return true;
        return false;
    };
    CHECK(has("x1", "exclusion_reason"));
    CHECK(has("x2", "age_group"));
    CHECK(has("x3", "frame_index"));
    CHECK(has("x3", "sample_id"));
}

TEST_CASE("validate_manifest checks bbox against real image bounds") {
    const fs::path dir = fs::temp_directory_path() / "ferbench_validate";
    fs::remove_all(dir);
    fs::create_directories(dir / "images");
    io::write_png(dir / "images" / "a.png", io::Image::make(64, 64, 3));

    DatasetManifest m;
    m.name = "demo";
    SampleRecord ok = base_record("a");
    ok.media_path = "images/a.png";
    ok.face_bbox = PixelBox{10, 10, 40, 40};
    m.samples.push_back(ok);
    CHECK(validate_manifest(m, dir).empty());

    m.samples[0].face_bbox = PixelBox{30, 30, 64, 40};  // exceeds width
    const auto violations = validate_manifest(m, dir);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].rule == "face_bbox");
    CHECK(violations[0].sample_id == "a");
}

TEST_CASE("statistics: user counts and images per user") {
    DatasetManifest m;
    m.name = "demo";
    for (int i = 0; i < 4; ++i) {
        SampleRecord r = base_record("s" + std::to_string(i));
        r.user_id = i < 3 ? "u1" : "u2";
        m.samples.push_back(r);
    }
    const StatisticsBundle b = compute_statistics({m});
    CHECK(b.image_count_per_dataset.at("demo") == 4);
    CHECK(b.user_count_per_dataset.at("demo") == 2);
    CHECK(b.images_per_user.at("demo") == doctest::Approx(2.0));
}

TEST_CASE("statistics: degenerate gender distribution") {
    DatasetManifest m;
    m.name = "demo";
    for (int i = 0; i < 3; ++i) {
        SampleRecord r = base_record("s" + std::to_string(i));
        r.gender = Gender::male;
        m.samples.push_back(r);
    }
    const StatisticsBundle b = compute_statistics({m});
    CHECK(b.gender_distribution.at("demo").at(Gender::male) == doctest::Approx(1.0));
    CHECK(b.gender_distribution.at("demo").count(Gender::female) == 0);
}

TEST_CASE("statistics: combined 1-year age histogram") {
    DatasetManifest m1;
    m1.name = "a";
    for (double age : {10.0, 10.0, 30.0}) {
        SampleRecord r = base_record("a" + std::to_string(m1.samples.size()));
        r.age_years = age;
        m1.samples.push_back(r);
    }
    DatasetManifest m2;
    m2.name = "b";
    SampleRecord r = base_record("b0");
    r.age_years = 60;
    m2.samples.push_back(r);

    const StatisticsBundle b = compute_statistics({m1, m2});
    CHECK(b.age_histogram.at(10) == 2);
    CHECK(b.age_histogram.at(30) == 1);
    CHECK(b.age_histogram.at(60) == 1);
    CHECK(b.age_histogram.size() == 3);
}

TEST_CASE("statistics skip excluded samples and user-less datasets") {
    DatasetManifest m;
    m.name = "demo";
    SampleRecord kept = base_record("kept");
    SampleRecord dropped = base_record("dropped");
    dropped.excluded = true;
    dropped.exclusion_reason = "no_face";
    dropped.age_years = 40;
    m.samples = {kept, dropped};

    const StatisticsBundle b = compute_statistics({m});
    CHECK(b.image_count_per_dataset.at("demo") == 1);
    CHECK(b.user_count_per_dataset.count("demo") == 0);
    CHECK(b.images_per_user.count("demo") == 0);
    CHECK(b.age_histogram.empty());
}

TEST_CASE("statistics fractions sum to one and are permutation invariant") {
    Rng rng(33);
    std::vector<DatasetManifest> manifests(3);
    for (std::size_t d = 0; d < manifests.size(); ++d) {
        manifests[d].name = "d" + std::to_string(d);
        for (int i = 0; i < 40; ++i) {
            SampleRecord r = random_record(rng, static_cast<std::size_t>(i));
            r.dataset = manifests[d].name;
            manifests[d].samples.push_back(r);
        }
    }
    const StatisticsBundle b1 = compute_statistics(manifests);

    auto check_sums = [](const auto& dist_map) {
        for (const auto& [name, dist] : dist_map) {
            double sum = 0;
            for (const auto& [k, v] : dist) sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    };
    check_sums(b1.gender_distribution);
    check_sums(b1.age_group_distribution);
    check_sums(b1.class_distribution);

    // Shuffle sample order and dataset order; every statistic must match.
    std::vector<DatasetManifest> shuffled = {manifests[2], manifests[0], manifests[1]};
    for (auto& m : shuffled) {
        Rng srng(7);
        srng.shuffle(m.samples);
    }
    const StatisticsBundle b2 = compute_statistics(shuffled);
    CHECK(b1.image_count_per_dataset == b2.image_count_per_dataset);
    CHECK(b1.user_count_per_dataset == b2.user_count_per_dataset);
    CHECK(b1.age_histogram == b2.age_histogram);
    CHECK(b1.gender_distribution == b2.gender_distribution);
    CHECK(b1.age_group_distribution == b2.age_group_distribution);
    CHECK(b1.class_distribution == b2.class_distribution);
}

TEST_CASE("class distribution counts equal the non-excluded sample count") {
    Rng rng(34);
    DatasetManifest m;
    m.name = "demo";
    for (int i = 0; i < 60; ++i) {
        SampleRecord r = base_record("s" + std::to_string(i));
        r.label = all_expression_labels()[static_cast<std::size_t>(rng.uniform_int(7))];
        if (rng.bernoulli(0.25)) {
            r.excluded = true;
            r.exclusion_reason = "no_face";
        }
        m.samples.push_back(r);
    }
    const StatisticsBundle b = compute_statistics({m});
    double total_fraction = 0;
    for (const auto& [label, f] : b.class_distribution.at("demo")) total_fraction += f;
    CHECK(total_fraction == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.image_count_per_dataset.at("demo") == m.non_excluded_count());
}

TEST_CASE("statistics csv export is deterministic") {
    DatasetManifest m;
    m.name = "demo";
    SampleRecord r = base_record("a");
    r.age_years = 31;
    r.gender = Gender::female;
    r.age_group = AgeGroup::adult;
    m.samples.push_back(r);

    const fs::path dir1 = fs::temp_directory_path() / "ferbench_stats1";
    const fs::path dir2 = fs::temp_directory_path() / "ferbench_stats2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    const StatisticsBundle b = compute_statistics({m});
    const auto names1 = export_statistics_csv(b, dir1);
    const auto names2 = export_statistics_csv(b, dir2);
    REQUIRE(names1 == names2);
    for (const auto& name : names1)
        CHECK(io::read_text(dir1 / name) == io::read_text(dir2 / name));
    CHECK_THROWS_AS(compute_statistics({}), ContractError);
}
