#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fixrev/clock.hpp"
#include "fixrev/manifest.hpp"

namespace fixrev {

// Identifies a registered dataset and the links recorded for its review.
struct DatasetRef {
    std::string repository_id;
    std::string dataset_id;
    std::string landing_url;
    std::string download_link;  // the link sealed at review time
    std::optional<std::string> persistent_id;
    std::optional<std::string> version_label;
};

struct FetchResult {
    std::string bytes;
    std::optional<std::string> media_type;
    std::int64_t fetched_at = 0;
    std::string source_link;
    int attempt = 1;
};

struct VersionInfo {
    std::string version_label;
    std::string download_link;
    std::int64_t created_at = 0;
};

// Uniform face over data repositories. download throws NotFound for dead or
// withdrawn links, Timeout/TransportError for transport faults.
class Connector {
  public:
    virtual ~Connector() = default;
    virtual FetchResult download(const std::string& link) = 0;
    virtual std::vector<VersionInfo> list_versions(const std::string& dataset_id) = 0;
};

// The four simulated repository behaviors.
//   Faithful     — serves registered bytes verbatim, retains every version.
//   TimestampZip — re-archives the payload on each download, stamping the
//                  current time into entry metadata (the download-link
//                  compression fault).
//   Mutable      — one stable link per dataset whose served content is
//                  silently swapped by admin actions (the mid-review
//                  replacement fault).
//   Overwriting  — updates discard prior versions; old links go dead.
enum class RepoBehavior { Faithful, TimestampZip, Mutable, Overwriting };

std::string_view to_string(RepoBehavior behavior);
RepoBehavior repo_behavior_from_string(std::string_view name);

// In-process repository with fault injection. Also usable as the admin
// handle: admin_replace / admin_withdraw change served content without any
// notification to the review workflow.
class SimulatedRepo final : public Connector {
  public:
    SimulatedRepo(RepoBehavior behavior, std::string repository_id, Clock* clock = nullptr);

    DatasetRef register_dataset(const std::string& dataset_id, std::vector<FileEntry> files,
                                std::optional<std::string> persistent_id = std::nullopt);

    // Serves the new content afterwards; per behavior this either appends a
    // retained version (Faithful/TimestampZip), swaps in place (Mutable), or
    // destroys history (Overwriting).
    void admin_replace(const std::string& dataset_id, std::vector<FileEntry> new_files);

    // All of the dataset's links stop resolving.
    void admin_withdraw(const std::string& dataset_id);

    FetchResult download(const std::string& link) override;
    std::vector<VersionInfo> list_versions(const std::string& dataset_id) override;

    RepoBehavior behavior() const noexcept { return behavior_; }
    const std::string& repository_id() const noexcept { return repository_id_; }

    // "sim://<repo>/<dataset>/<leaf>" → path "<repo>/<dataset>/<leaf>", as
    // served by the HTTP facade.
    static std::string link_path(const std::string& sim_link);

  private:
    struct Version {
        std::string label;
        std::vector<FileEntry> files;
        std::int64_t created_at = 0;
    };
    struct Dataset {
        std::vector<Version> versions;
        std::optional<std::string> persistent_id;
        bool withdrawn = false;
    };

    std::string link_for(const std::string& dataset_id, std::size_t version_index) const;
    std::string landing_link(const std::string& dataset_id) const;
    FetchResult serve(const Dataset& ds, const Version& v, const std::string& link);

    RepoBehavior behavior_;
    std::string repository_id_;
    Clock* clock_;
    mutable std::mutex mu_;  // serializes downloads against admin mutations
    std::map<std::string, Dataset> datasets_;
};

struct RequirementCheck {
    std::string name;
    bool passed = false;
    std::string evidence;
};

struct RequirementReport {
    std::vector<RequirementCheck> checks;
    bool overall = false;
};

// Behavioral conformance against the repository requirements: landing page
// reachable, persistent identifier present, reviewed link unique, prior
// versions accessible, data openly fetchable. With an admin handle the
// unique-link and prior-version checks mutate the dataset and observe the
// consequences (destructive; run against a scratch dataset); without one
// they degrade to observation only.
RequirementReport check_repo_requirements(Connector& connector, const DatasetRef& ref,
                                          SimulatedRepo* admin = nullptr);

}  // namespace fixrev
