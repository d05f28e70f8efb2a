#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iemo/algorithms.hpp"

namespace iemo {

enum class SessionPhase { running, awaiting_judgment, finished, aborted };

std::string to_string(SessionPhase phase);

/// Error surfaced to HTTP clients as {code, message, field?} with `status`.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message, std::string field = {});
    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }
    nlohmann::json to_json() const;

private:
    int status_;
    std::string code_;
    std::string field_;
};

enum class Outcome { better, worse, indifferent };

Outcome parse_outcome(std::string_view text);
/// better -> 1 (first candidate preferred), worse -> -1, indifferent -> 0.
int judgment_value(Outcome outcome);

class Session;

/// Owns the live sessions and their event logs under `root/sessions/<id>/events.jsonl`.
/// Construction replays every log found there, so a restarted service resumes each
/// session at the same pending pair.
class SessionManager {
public:
    explicit SessionManager(std::filesystem::path root);
    ~SessionManager();
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    /// Starts a run in the background and returns once its initial population exists.
    std::string create(const nlohmann::json& config);
    nlohmann::json list() const;
    nlohmann::json state(const std::string& id) const;
    /// {"phase", "query": null | {consultation, pair_index, total, answered, a, b}}
    nlohmann::json query(const std::string& id) const;
    nlohmann::json submit(const std::string& id, std::size_t pair_index, Outcome outcome);
    nlohmann::json population(const std::string& id) const;
    /// Aborts a live run (logged, not replayed further).
    nlohmann::json abort(const std::string& id);

    /// Blocks until the session leaves `running` (awaits a judgment or ends). Test helper.
    SessionPhase wait_until_idle(const std::string& id) const;

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    Session& find(const std::string& id) const;
    std::string fresh_id();

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Session>> sessions_;
    std::vector<std::string> order_;
};

}  // namespace iemo
