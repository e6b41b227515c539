// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pick/distribution.hpp"

namespace pick::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(PICK_FIXTURE_DIR) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("pick-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::vector<std::string> class_names(std::size_t k) {
    if (k == 2) return binary_class_names();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < k; ++i) names.push_back("c" + std::to_string(i));
    return names;
}

/// Random point on the simplex (flat Dirichlet via exponential draws).
inline std::vector<double> random_simplex(std::size_t k, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) sum += (x = expo(rng));
    for (auto& x : v) x /= sum;
    return v;
}

inline EmotionDistribution random_distribution(std::size_t k, std::mt19937_64& rng) {
    return EmotionDistribution::normalized(class_names(k), random_simplex(k, rng));
}

}  // namespace pick::testing
