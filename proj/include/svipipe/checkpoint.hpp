#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

// Append-only completion log enabling crash-safe resume. One record per
// line: unit_id<TAB>status<TAB>iso8601. Replaying the log yields a set, so
// duplicate completions are harmless.

namespace svipipe::acquire {

class Checkpoint {
  public:
    explicit Checkpoint(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const size_t tab1 = line.find('\t');
            if (tab1 == std::string::npos) continue;  // tolerate a torn tail line
            const size_t tab2 = line.find('\t', tab1 + 1);
            const std::string unit = line.substr(0, tab1);
            const std::string status =
                tab2 == std::string::npos ? line.substr(tab1 + 1)
                                          : line.substr(tab1 + 1, tab2 - tab1 - 1);
            if (status == "done") done_.insert(unit);
        }
        out_.open(path_, std::ios::app);
        if (!out_) throw std::runtime_error("cannot open checkpoint for append: " + path_);
    }

    bool is_done(const std::string& unit_id) const {
        std::lock_guard lock(mutex_);
        return done_.count(unit_id) > 0;
    }

    void mark_done(const std::string& unit_id) { append(unit_id, "done"); }

    void mark_failed(const std::string& unit_id) { append(unit_id, "failed"); }

    size_t done_count() const {
        std::lock_guard lock(mutex_);
        return done_.size();
    }

  private:
    void append(const std::string& unit_id, const char* status) {
        std::lock_guard lock(mutex_);
        out_ << unit_id << '\t' << status << '\t' << now_iso8601() << '\n';
        out_.flush();
        if (std::string(status) == "done") done_.insert(unit_id);
    }

    static std::string now_iso8601() {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::string path_;
    mutable std::mutex mutex_;
    std::set<std::string> done_;
    std::ofstream out_;
};

}  // namespace svipipe::acquire
