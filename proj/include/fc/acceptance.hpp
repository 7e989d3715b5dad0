#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fc {

/// One verification criterion of the batch suite.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;  // instance counts, or the first failing instance
};

/// Runs the whole verification battery against the bundled documents in
/// `data_dir`.  Deterministic; every criterion demands exact equality at its
/// declared precision.
/// `progress`, when set, receives each result as soon as it is computed.
std::vector<CriterionResult> run_acceptance_suite(
    const std::string& data_dir,
    const std::function<void(const CriterionResult&)>& progress = {});

}  // namespace fc
