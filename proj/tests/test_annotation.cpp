#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "ferbench/annotate/batch_protocol.hpp"
#include "ferbench/annotate/stub.hpp"
#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/io/image.hpp"
#include "ferbench/synth/generator.hpp"

using namespace ferbench;
namespace fs = std::filesystem;

TEST_CASE("pose bins at the anchor angles") {
    CHECK(bin_head_pose(0) == HeadPose::front);
    CHECK(bin_head_pose(-45) == HeadPose::half_left);
    CHECK(bin_head_pose(45) == HeadPose::half_right);
    CHECK(bin_head_pose(100) == HeadPose::full_right);
    CHECK(bin_head_pose(-90) == HeadPose::full_left);
    CHECK(bin_head_pose(180) == HeadPose::back);
    CHECK(bin_head_pose(-180) == HeadPose::back);
}

TEST_CASE("pose bin boundaries sit at the midpoints") {
    CHECK(bin_head_pose(22.5) == HeadPose::front);
    CHECK(bin_head_pose(22.51) == HeadPose::half_right);
    CHECK(bin_head_pose(67.5) == HeadPose::half_right);
    CHECK(bin_head_pose(67.51) == HeadPose::full_right);
    CHECK(bin_head_pose(112.5) == HeadPose::full_right);
    CHECK(bin_head_pose(112.51) == HeadPose::back);
}

TEST_CASE("pose bins partition the yaw range, sweep in half-degree steps") {
    for (double yaw = -180.0; yaw <= 180.0; yaw += 0.5) {
        const HeadPose bin = bin_head_pose(yaw);
        int hits = 0;
        for (HeadPose p : {HeadPose::front, HeadPose::half_left, HeadPose::half_right,
                           HeadPose::full_left, HeadPose::full_right, HeadPose::back})
            if (bin == p) ++hits;
        CHECK(hits == 1);
    }
    CHECK_THROWS_AS(bin_head_pose(181), ContractError);
    CHECK_THROWS_AS(bin_head_pose(-200), ContractError);
}

TEST_CASE("pose bins are left-right symmetric") {
    auto mirror = [](HeadPose p) {
        switch (p) {
            case HeadPose::half_left: return HeadPose::half_right;
            case HeadPose::half_right: return HeadPose::half_left;
            case HeadPose::full_left: return HeadPose::full_right;
            case HeadPose::full_right: return HeadPose::full_left;
            default: return p;
        }
    };
    for (double yaw = 0.0; yaw <= 180.0; yaw += 0.5)
        CHECK(bin_head_pose(-yaw) == mirror(bin_head_pose(yaw)));
}

namespace {

struct StubFixture {
    fs::path dir;
    std::shared_ptr<SidecarTruth> truth;
    AdapterSet adapters;

    StubFixture() {
        dir = fs::temp_directory_path() / "ferbench_stub";
        fs::remove_all(dir);
        fs::create_directories(dir);

        const SyntheticFace face = make_synthetic_face(160, 160, 5.0, 61);
        io::write_png(dir / "face.png", face.image);
        io::write_png(dir / "blank.png", io::Image::make(160, 160, 3, 10));

        truth = std::make_shared<SidecarTruth>();
        SidecarEntry two_faces;
        two_faces.sample_id = "face";
        two_faces.media_path = "face.png";
        two_faces.faces.push_back({PixelBox{5, 5, 20, 20}, 0.6});
        two_faces.faces.push_back({face.bbox, 0.9});
        two_faces.eye_left = face.eye_left;
        two_faces.eye_right = face.eye_right;
        two_faces.pose = HeadPoseEstimate{0.0, 1.0, -0.5};
        two_faces.age_years = 34.0;
        two_faces.gender = Gender::female;
        truth->add(two_faces);

        SidecarEntry blank;
        blank.sample_id = "blank";
        blank.media_path = "blank.png";
        truth->add(blank);

        adapters = make_stub_adapters(truth);
    }
};

}  // namespace

TEST_CASE("stub detector returns the highest-confidence face, none for blanks") {
    StubFixture fx;
    const auto det = fx.adapters.detector->detect_primary_face("face", fx.dir / "face.png");
    REQUIRE(det.has_value());
    CHECK(det->confidence == doctest::Approx(0.9));
    CHECK(det->bbox.width > 30);  // the marker face, not the small decoy

    CHECK(!fx.adapters.detector->detect_primary_face("blank", fx.dir / "blank.png")
               .has_value());
    CHECK(!fx.adapters.detector->detect_primary_face("unknown", fx.dir / "face.png")
               .has_value());
}

TEST_CASE("stub landmarks echo generator ground truth and validate the bbox") {
    StubFixture fx;
    const SidecarEntry* entry = fx.truth->find("face");
    const auto lm = fx.adapters.landmarks->estimate_landmarks_and_pose(
        "face", fx.dir / "face.png", entry->faces[1].bbox);
    REQUIRE(lm.has_value());
    CHECK(lm->eye_left.x == doctest::Approx(entry->eye_left->x));
    CHECK(lm->eye_right.y == doctest::Approx(entry->eye_right->y));
    CHECK(lm->pose.yaw == doctest::Approx(0.0));

    CHECK_THROWS_AS(fx.adapters.landmarks->estimate_landmarks_and_pose(
                        "face", fx.dir / "face.png", PixelBox{100, 100, 100, 100}),
                    ContractError);
}

TEST_CASE("stub age and gender echo generator tags") {
    StubFixture fx;
    const SidecarEntry* entry = fx.truth->find("face");
    const auto ag = fx.adapters.age_gender->estimate_age_gender(
        "face", fx.dir / "face.png", entry->faces[1].bbox);
    REQUIRE(ag.has_value());
    CHECK(ag->age_years == doctest::Approx(34.0));
    CHECK(ag->gender == Gender::female);
}

TEST_CASE("stubs are referentially transparent") {
    StubFixture fx;
    const SidecarEntry* entry = fx.truth->find("face");
    for (int i = 0; i < 3; ++i) {
        const auto a = fx.adapters.detector->detect_primary_face("face", fx.dir / "face.png");
        const auto b = fx.adapters.landmarks->estimate_landmarks_and_pose(
            "face", fx.dir / "face.png", entry->faces[1].bbox);
        CHECK(a->bbox == entry->faces[1].bbox);
        CHECK(b->eye_left == *entry->eye_left);
    }
}

TEST_CASE("sidecar file round trip") {
    StubFixture fx;
    fx.truth->save(fx.dir / "sidecar.jsonl");
    const SidecarTruth loaded = SidecarTruth::load(fx.dir / "sidecar.jsonl");
    CHECK(loaded.size() == 2);
    const SidecarEntry* entry = loaded.find("face");
    REQUIRE(entry != nullptr);
    CHECK(entry->faces.size() == 2);
    CHECK(entry->age_years == 34.0);
}

TEST_CASE("batch protocol round-trips with absent fields as empty columns") {
    std::vector<BatchRequest> requests = {
        {"s1", "/img/a.png", PixelBox{1, 2, 30, 40}},
        {"s2", "/img/b.png", PixelBox{0, 0, 10, 10}},
    };
    const auto parsed_req = parse_batch_requests(serialize_batch_requests(requests));
    REQUIRE(parsed_req.size() == 2);
    CHECK(parsed_req[0].sample_id == "s1");
    CHECK(parsed_req[0].bbox == requests[0].bbox);

    std::vector<BatchResponse> responses(2);
    responses[0].sample_id = "s1";
    LandmarkEstimate lm;
    lm.eye_left = {10, 11};
    lm.eye_right = {30, 12};
    lm.pose = {5, -2, 0.5};
    lm.confidence = 0.8;
    responses[0].landmarks = lm;
    responses[0].age_gender = AgeGenderEstimate{31.5, Gender::male, std::nullopt};
    responses[1].sample_id = "s2";  // everything absent

    const auto parsed = parse_batch_responses(serialize_batch_responses(responses));
    REQUIRE(parsed.size() == 2);
    REQUIRE(parsed[0].landmarks.has_value());
    CHECK(parsed[0].landmarks->eye_right.x == doctest::Approx(30));
    CHECK(parsed[0].landmarks->confidence == doctest::Approx(0.8));
    REQUIRE(parsed[0].age_gender.has_value());
    CHECK(parsed[0].age_gender->age_years == doctest::Approx(31.5));
    CHECK(!parsed[0].age_gender->confidence.has_value());
    CHECK(!parsed[1].landmarks.has_value());
    CHECK(!parsed[1].age_gender.has_value());
}

TEST_CASE("batch command runs an external annotator over protocol files") {
    StubFixture fx;
    fx.truth->save(fx.dir / "sidecar.jsonl");

    const SidecarEntry* entry = fx.truth->find("face");
    std::vector<BatchRequest> requests = {
        {"face", fx.dir / "face.png", entry->faces[1].bbox}};

    const std::string command = std::string(FERBENCH_CLI_PATH) +
                                " stub-annotate --sidecar " +
                                (fx.dir / "sidecar.jsonl").string();
    const auto responses = run_batch_command(command, requests, fx.dir / "work");
    REQUIRE(responses.size() == 1);
    REQUIRE(responses[0].landmarks.has_value());
    CHECK(responses[0].landmarks->eye_left.x == doctest::Approx(entry->eye_left->x));
    REQUIRE(responses[0].age_gender.has_value());
    CHECK(responses[0].age_gender->gender == Gender::female);

    CHECK_THROWS_AS(run_batch_command("false", requests, fx.dir / "work"),
                    AnnotationError);
}
