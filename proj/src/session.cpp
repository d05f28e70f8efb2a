#include "iemo/session.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <random>
#include <thread>

#include "iemo/config.hpp"
#include "iemo/dm.hpp"
#include "iemo/log.hpp"

namespace iemo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(SessionPhase phase) {
    switch (phase) {
        case SessionPhase::running: return "running";
        case SessionPhase::awaiting_judgment: return "awaiting_judgment";
        case SessionPhase::finished: return "finished";
        case SessionPhase::aborted: return "aborted";
    }
    return "unknown";
}

ServiceError::ServiceError(int status, std::string code, const std::string& message, std::string field)
    : std::runtime_error(message), status_(status), code_(std::move(code)), field_(std::move(field)) {}

json ServiceError::to_json() const {
    json j{{"code", code_}, {"message", what()}};
    if (!field_.empty()) j["field"] = field_;
    return j;
}

Outcome parse_outcome(std::string_view text) {
    if (text == "better") return Outcome::better;
    if (text == "worse") return Outcome::worse;
    if (text == "indifferent") return Outcome::indifferent;
    throw ServiceError(422, "invalid_judgment", "outcome must be better, worse or indifferent", "outcome");
}

int judgment_value(Outcome outcome) {
    switch (outcome) {
        case Outcome::better: return 1;
        case Outcome::worse: return -1;
        case Outcome::indifferent: return 0;
    }
    return 0;
}

namespace {

const char* outcome_name(int c) { return c > 0 ? "better" : (c < 0 ? "worse" : "indifferent"); }

struct ReplayItem {
    ObjectiveVector fi;
    ObjectiveVector fj;
    int c{0};
};

struct Member {
    ObjectiveVector f;
    std::optional<double> utility;
};

}  // namespace

class Session : public DecisionMaker {
public:
    Session(std::string id, RunConfig cfg, fs::path dir, std::deque<ReplayItem> replay, bool replay_aborted,
            bool replay_finished)
        : id_(std::move(id)),
          cfg_(std::move(cfg)),
          dir_(std::move(dir)),
          replay_(std::move(replay)),
          replay_aborted_(replay_aborted),
          finished_logged_(replay_finished),
          aborted_logged_(replay_aborted) {
        fs::create_directories(dir_);
        log_.open(dir_ / "events.jsonl", std::ios::app | std::ios::binary);
        if (!log_) throw std::runtime_error("cannot open event log in " + dir_.string());
    }

    ~Session() override { shutdown(); }

    void log_created() { append({{"type", "created"}, {"id", id_}, {"config", to_json(cfg_)}}); }

    void start() {
        worker_ = std::thread([this] { work(); });
        std::unique_lock lock(m_);
        cv_.wait(lock, [this] { return has_snapshot_ || phase_ != SessionPhase::running; });
    }

    void shutdown() {
        {
            std::lock_guard lock(m_);
            stopping_ = true;
        }
        cv_.notify_all();
        if (worker_.joinable()) worker_.join();
    }

    std::vector<Judgment> consult(std::span<const ObjectiveVector> candidates, std::span<const QueryPair> pairs) override {
        std::unique_lock lock(m_);
        if (abort_requested_) throw DecisionMakerAborted("aborted by request");
        candidates_.assign(candidates.begin(), candidates.end());
        pairs_.assign(pairs.begin(), pairs.end());
        answers_.clear();
        while (answers_.size() < pairs_.size() && !replay_.empty()) {
            const ReplayItem item = replay_.front();
            replay_.pop_front();
            const auto& [i, j] = pairs_[answers_.size()];
            if (item.fi != candidates_[i] || item.fj != candidates_[j])
                throw DecisionMakerAborted("event log does not match the replayed run");
            judgments_.push_back(judgment_event(answers_.size(), item.c));
            answers_.push_back({item.c, false});
        }
        if (answers_.size() < pairs_.size()) {
            if (replay_aborted_) throw DecisionMakerAborted("aborted by request");
            phase_ = SessionPhase::awaiting_judgment;
            cv_.notify_all();
            cv_.wait(lock, [this] { return answers_.size() == pairs_.size() || stopping_ || abort_requested_; });
            if (stopping_) throw DecisionMakerAborted("service shutting down");
            if (abort_requested_) throw DecisionMakerAborted("aborted by request");
        }
        ++consultations_;
        phase_ = SessionPhase::running;
        pairs_.clear();
        return answers_;
    }

    Judgment answer(std::span<const double>, std::span<const double>) override {
        throw DecisionMakerAborted("a human session answers whole consultations only");
    }

    json submit(std::size_t pair_index, Outcome outcome) {
        std::unique_lock lock(m_);
        if (phase_ == SessionPhase::finished || phase_ == SessionPhase::aborted)
            throw ServiceError(409, "session_closed", "session is " + to_string(phase_));
        if (phase_ != SessionPhase::awaiting_judgment)
            throw ServiceError(409, "no_pending_query", "no query is pending");
        if (pair_index < answers_.size())
            throw ServiceError(409, "duplicate_judgment", "pair " + std::to_string(pair_index) + " is already answered",
                               "pair_index");
        if (pair_index > answers_.size())
            throw ServiceError(409, "out_of_order", "the pending pair is " + std::to_string(answers_.size()),
                               "pair_index");
        const int c = judgment_value(outcome);
        const json event = judgment_event(pair_index, c);
        append(event);
        judgments_.push_back(event);
        answers_.push_back({c, false});
        const std::size_t remaining = pairs_.size() - answers_.size();
        if (remaining == 0) {
            phase_ = SessionPhase::running;
            cv_.notify_all();
        }
        return {{"accepted", true}, {"consultation", consultations_}, {"pair_index", pair_index}, {"remaining", remaining}};
    }

    json abort() {
        std::unique_lock lock(m_);
        if (phase_ == SessionPhase::finished || phase_ == SessionPhase::aborted)
            throw ServiceError(409, "session_closed", "session is " + to_string(phase_));
        abort_requested_ = true;
        abort_reason_ = "aborted by request";
        phase_ = SessionPhase::aborted;
        aborted_logged_ = true;
        append({{"type", "aborted"}, {"reason", abort_reason_}});
        cv_.notify_all();
        return state_locked();
    }

    json state() const {
        std::lock_guard lock(m_);
        return state_locked();
    }

    json query() const {
        std::lock_guard lock(m_);
        json j{{"phase", to_string(phase_)}, {"query", nullptr}};
        if (phase_ != SessionPhase::awaiting_judgment) return j;
        const std::size_t k = answers_.size();
        const auto& [a, b] = pairs_[k];
        j["query"] = {{"consultation", consultations_},
                      {"pair_index", k},
                      {"total", pairs_.size()},
                      {"answered", k},
                      {"a", {{"candidate", a}, {"f", candidates_[a]}}},
                      {"b", {{"candidate", b}, {"f", candidates_[b]}}}};
        return j;
    }

    json population() const {
        std::lock_guard lock(m_);
        std::vector<ObjectiveVector> f;
        for (const auto& s : snapshot_) f.push_back(s.f);
        std::vector<std::size_t> rank(f.size(), 0);
        const auto fronts = fast_nondominated_sort(f);
        for (std::size_t r = 0; r < fronts.size(); ++r)
            for (std::size_t i : fronts[r]) rank[i] = r;
        json members = json::array();
        for (std::size_t i = 0; i < snapshot_.size(); ++i) {
            json mj{{"f", snapshot_[i].f}, {"rank", rank[i]}};
            mj["utility"] = snapshot_[i].utility ? json(*snapshot_[i].utility) : json(nullptr);
            members.push_back(mj);
        }
        return {{"id", id_},         {"phase", to_string(phase_)}, {"generation", generation_},
                {"fe_used", fe_},    {"size", snapshot_.size()},   {"members", members}};
    }

    SessionPhase wait_until_idle() const {
        std::unique_lock lock(m_);
        cv_.wait(lock, [this] { return phase_ != SessionPhase::running; });
        return phase_;
    }

    SessionPhase phase() const {
        std::lock_guard lock(m_);
        return phase_;
    }

private:
    json judgment_event(std::size_t pair_index, int c) const {
        const auto& [i, j] = pairs_[pair_index];
        return {{"type", "judgment"},     {"consultation", consultations_}, {"pair_index", pair_index},
                {"outcome", outcome_name(c)}, {"c", c}, {"fi", candidates_[i]}, {"fj", candidates_[j]}};
    }

    void append(const json& event) {
        log_ << event.dump() << '\n';
        log_.flush();
        if (!log_) throw ServiceError(500, "storage_error", "could not persist the event");
    }

    json state_locked() const {
        json j{{"id", id_},
               {"phase", to_string(phase_)},
               {"generation", generation_},
               {"fe_used", fe_},
               {"max_fe", cfg_.max_fe},
               {"consultations", consultations_},
               {"judgments", judgments_.size()},
               {"config", to_json(cfg_)}};
        j["pending"] = phase_ == SessionPhase::awaiting_judgment
                           ? json{{"consultation", consultations_}, {"answered", answers_.size()}, {"total", pairs_.size()}}
                           : json(nullptr);
        if (!abort_reason_.empty()) j["abort_reason"] = abort_reason_;
        return j;
    }

    void work() {
        RunHooks hooks;
        hooks.on_generation = [this](const GenerationTrace& t, const Population& pop, const PreferenceModel*) {
            std::lock_guard lock(m_);
            if (abort_requested_) return;
            generation_ = t.generation;
            fe_ = t.fe;
            snapshot_.clear();
            for (const auto& s : pop.members) snapshot_.push_back({s.f, s.utility});
            has_snapshot_ = true;
            cv_.notify_all();
        };
        RunResult result;
        std::string failure;
        try {
            result = run(cfg_, *this, hooks);
        } catch (const std::exception& e) {
            failure = e.what();
        }

        std::lock_guard lock(m_);
        if (stopping_ && !abort_requested_) {
            cv_.notify_all();
            return;
        }
        if (!failure.empty() || result.aborted) {
            phase_ = SessionPhase::aborted;
            if (abort_reason_.empty()) abort_reason_ = failure.empty() ? result.abort_reason : failure;
            if (!aborted_logged_) {
                aborted_logged_ = true;
                append({{"type", "aborted"}, {"reason", abort_reason_}});
            }
        } else {
            phase_ = SessionPhase::finished;
            json j{{"id", id_},
                   {"fe_used", result.fe_used},
                   {"generations", result.generations},
                   {"final_population", to_json(result.final_population)}};
            json consultations = json::array();
            for (const auto& c : result.consultation_log) consultations.push_back(to_json(c));
            j["consultations"] = consultations;
            std::ofstream out(dir_ / "result.json", std::ios::binary);
            out << j.dump() << '\n';
            if (!finished_logged_) {
                finished_logged_ = true;
                append({{"type", "finished"}, {"fe_used", result.fe_used}, {"generations", result.generations}});
            }
        }
        cv_.notify_all();
    }

    std::string id_;
    RunConfig cfg_;
    fs::path dir_;
    std::ofstream log_;

    mutable std::mutex m_;
    mutable std::condition_variable cv_;
    SessionPhase phase_{SessionPhase::running};
    std::size_t generation_{0};
    std::size_t fe_{0};
    std::vector<Member> snapshot_;
    bool has_snapshot_{false};

    std::vector<ObjectiveVector> candidates_;
    std::vector<QueryPair> pairs_;
    std::vector<Judgment> answers_;
    std::size_t consultations_{0};
    std::vector<json> judgments_;

    std::deque<ReplayItem> replay_;
    bool replay_aborted_{false};
    bool finished_logged_{false};
    bool aborted_logged_{false};
    bool stopping_{false};
    bool abort_requested_{false};
    std::string abort_reason_;
    std::thread worker_;
};

SessionManager::SessionManager(fs::path root) : root_(std::move(root)) {
    const fs::path dir = root_ / "sessions";
    fs::create_directories(dir);
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "events.jsonl")) found.push_back(entry.path());
    std::sort(found.begin(), found.end());

    for (const auto& path : found) {
        std::ifstream in(path / "events.jsonl");
        std::string line;
        std::optional<RunConfig> cfg;
        std::deque<ReplayItem> replay;
        bool aborted = false;
        bool finished = false;
        std::string id = path.filename().string();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json e;
            try {
                e = json::parse(line);
            } catch (const json::parse_error&) {
                log::warning("session " + id + ": ignoring a torn event log line");
                break;
            }
            const auto type = e.value("type", std::string());
            if (type == "created") cfg = run_config_from_json(e.at("config"));
            else if (type == "judgment")
                replay.push_back({e.at("fi").get<ObjectiveVector>(), e.at("fj").get<ObjectiveVector>(), e.at("c").get<int>()});
            else if (type == "aborted") aborted = true;
            else if (type == "finished") finished = true;
        }
        if (!cfg) {
            log::warning("session " + id + ": event log has no creation record; skipped");
            continue;
        }
        auto session = std::make_unique<Session>(id, *cfg, path, std::move(replay), aborted, finished);
        session->start();
        order_.push_back(id);
        sessions_.emplace(id, std::move(session));
    }
}

SessionManager::~SessionManager() {
    for (auto& [id, s] : sessions_) s->shutdown();
}

std::string SessionManager::fresh_id() {
    static const char* hex = "0123456789abcdef";
    std::random_device rd;
    for (;;) {
        std::string id = "s";
        for (int i = 0; i < 12; ++i) id += hex[rd() % 16];
        if (!sessions_.count(id) && !fs::exists(root_ / "sessions" / id)) return id;
    }
}

std::string SessionManager::create(const json& config) {
    RunConfig cfg = run_config_from_json(config);
    std::lock_guard lock(mutex_);
    const std::string id = fresh_id();
    auto session = std::make_unique<Session>(id, cfg, root_ / "sessions" / id, std::deque<ReplayItem>{}, false, false);
    session->log_created();
    session->start();
    order_.push_back(id);
    sessions_.emplace(id, std::move(session));
    return id;
}

Session& SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "not_found", "no session '" + id + "'");
    return *it->second;
}

json SessionManager::list() const {
    std::lock_guard lock(mutex_);
    json out = json::array();
    for (const auto& id : order_) {
        const auto s = sessions_.at(id)->state();
        out.push_back({{"id", id}, {"phase", s.at("phase")}, {"generation", s.at("generation")}});
    }
    return out;
}

json SessionManager::state(const std::string& id) const { return find(id).state(); }
json SessionManager::query(const std::string& id) const { return find(id).query(); }
json SessionManager::population(const std::string& id) const { return find(id).population(); }
json SessionManager::abort(const std::string& id) { return find(id).abort(); }
SessionPhase SessionManager::wait_until_idle(const std::string& id) const { return find(id).wait_until_idle(); }

json SessionManager::submit(const std::string& id, std::size_t pair_index, Outcome outcome) {
    return find(id).submit(pair_index, outcome);
}

}  // namespace iemo
