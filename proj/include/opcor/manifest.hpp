#pragma once

#include "opcor/matrix_io.hpp"
#include "opcor/wings.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace opcor {

// On-disk description of one generated case study: geometry, angle grids,
// and the relative paths of the matrix files.
struct CaseManifest {
    WingConfig wing;
    DatasetConfig train;
    DatasetConfig test;

    struct Files {
        std::string full_operator = "T.mat";
        std::string misspecified_operator = "M.mat";
        std::string train_controls = "Q_train.mat";
        std::string train_observations = "D_train.mat";
        std::string test_controls = "Q_test.mat";
        std::string test_observations = "D_test.mat";
    } files;
};

namespace detail {

inline nlohmann::json to_json(const DatasetConfig& c) {
    return {{"angles_deg", c.angles_deg},
            {"speed", c.speed},
            {"noise_std", c.noise_std},
            {"seed", c.seed}};
}

inline DatasetConfig dataset_from_json(const nlohmann::json& j) {
    DatasetConfig c;
    c.angles_deg = j.at("angles_deg").get<std::vector<double>>();
    c.speed = j.at("speed").get<double>();
    c.noise_std = j.at("noise_std").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace detail

inline void save_manifest(const std::filesystem::path& path, const CaseManifest& m) {
    nlohmann::json j;
    j["wing"] = {{"panels_per_wing", m.wing.panels_per_wing},
                 {"chord", m.wing.chord},
                 {"thickness_ratio", m.wing.thickness_ratio},
                 {"second_wing_offset", {m.wing.second_wing_offset.x(), m.wing.second_wing_offset.y()}}};
    j["train"] = detail::to_json(m.train);
    j["test"] = detail::to_json(m.test);
    j["files"] = {{"full_operator", m.files.full_operator},
                  {"misspecified_operator", m.files.misspecified_operator},
                  {"train_controls", m.files.train_controls},
                  {"train_observations", m.files.train_observations},
                  {"test_controls", m.files.test_controls},
                  {"test_observations", m.files.test_observations}};
    detail::atomic_write(path, j.dump(2) + "\n");
}

inline CaseManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("manifest not readable: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest " + path.string() + ": " + e.what());
    }
    try {
        CaseManifest m;
        const auto& wing = j.at("wing");
        m.wing.panels_per_wing = wing.at("panels_per_wing").get<int>();
        m.wing.chord = wing.at("chord").get<double>();
        m.wing.thickness_ratio = wing.at("thickness_ratio").get<double>();
        const auto offset = wing.at("second_wing_offset").get<std::vector<double>>();
        if (offset.size() != 2)
            throw ValidationError("manifest " + path.string() + ": second_wing_offset needs 2 entries");
        m.wing.second_wing_offset = Point2(offset[0], offset[1]);
        m.train = detail::dataset_from_json(j.at("train"));
        m.test = detail::dataset_from_json(j.at("test"));
        const auto& files = j.at("files");
        m.files.full_operator = files.at("full_operator").get<std::string>();
        m.files.misspecified_operator = files.at("misspecified_operator").get<std::string>();
        m.files.train_controls = files.at("train_controls").get<std::string>();
        m.files.train_observations = files.at("train_observations").get<std::string>();
        m.files.test_controls = files.at("test_controls").get<std::string>();
        m.files.test_observations = files.at("test_observations").get<std::string>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("manifest " + path.string() + ": " + e.what());
    }
}

// A fully loaded case: operators plus training and test sets.
struct CaseData {
    CaseManifest manifest;
    Matrix full_operator;
    Matrix misspecified;
    TrainingSet train;
    TrainingSet test;
};

// Loads every matrix named by the manifest and rejects any dimension
// mismatch before compute starts.
inline CaseData load_case(const std::filesystem::path& manifest_path) {
    CaseData data;
    data.manifest = load_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    const auto& files = data.manifest.files;
    data.full_operator = load_matrix(dir / files.full_operator);
    data.misspecified = load_matrix(dir / files.misspecified_operator);
    data.train.controls = load_matrix(dir / files.train_controls);
    data.train.observations = load_matrix(dir / files.train_observations);
    data.test.controls = load_matrix(dir / files.test_controls);
    data.test.observations = load_matrix(dir / files.test_observations);

    const int p = data.manifest.wing.panels_per_wing;
    auto fail = [&](const std::string& what) {
        throw ValidationError("manifest " + manifest_path.string() + ": " + what);
    };
    if (data.full_operator.rows() != data.full_operator.cols()) fail("full operator is not square");
    if (data.full_operator.rows() != 2 * p) fail("full operator dimension disagrees with wing config");
    if (data.misspecified.rows() != data.misspecified.cols()) fail("misspecified operator is not square");
    if (data.misspecified.rows() != p) fail("misspecified operator dimension disagrees with wing config");
    const auto check_set = [&](const TrainingSet& set, const DatasetConfig& cfg, const std::string& name) {
        if (set.controls.rows() != p || set.observations.rows() != p)
            fail(name + " set rows disagree with the wing of interest");
        if (set.controls.cols() != set.observations.cols())
            fail(name + " controls and observations have different realization counts");
        if (set.controls.cols() != static_cast<Eigen::Index>(cfg.angles_deg.size()))
            fail(name + " set columns disagree with the manifest angle list");
    };
    check_set(data.train, data.manifest.train, "train");
    check_set(data.test, data.manifest.test, "test");
    return data;
}

}  // namespace opcor
