#include "fixrev/repository.hpp"

#include <algorithm>

#include "fixrev/errors.hpp"
#include "fixrev/stability.hpp"
#include "fixrev/zip.hpp"

namespace fixrev {

namespace {

constexpr std::string_view kSimScheme = "sim://";

// Fixed stamp for deterministic archives (DOS epoch).
constexpr std::int64_t kFixedArchiveEpoch = 315532800;  // 1980-01-01T00:00:00Z

struct ParsedSimLink {
    std::string repo;
    std::string dataset;
    std::string leaf;
};

ParsedSimLink parse_sim_link(const std::string& link) {
    if (link.rfind(kSimScheme, 0) != 0) {
        throw Error(ErrorCode::NotFound, "not a simulated-repository link: " + link);
    }
    std::string rest = link.substr(kSimScheme.size());
    std::size_t s1 = rest.find('/');
    std::size_t s2 = s1 == std::string::npos ? std::string::npos : rest.find('/', s1 + 1);
    if (s1 == std::string::npos || s2 == std::string::npos || s2 + 1 >= rest.size()) {
        throw Error(ErrorCode::NotFound, "malformed simulated link: " + link);
    }
    return ParsedSimLink{rest.substr(0, s1), rest.substr(s1 + 1, s2 - s1 - 1), rest.substr(s2 + 1)};
}

}  // namespace

std::string_view to_string(RepoBehavior behavior) {
    switch (behavior) {
        case RepoBehavior::Faithful: return "faithful";
        case RepoBehavior::TimestampZip: return "timestamp-zip";
        case RepoBehavior::Mutable: return "mutable";
        case RepoBehavior::Overwriting: return "overwriting";
    }
    return "faithful";
}

RepoBehavior repo_behavior_from_string(std::string_view name) {
    if (name == "faithful") return RepoBehavior::Faithful;
    if (name == "timestamp-zip") return RepoBehavior::TimestampZip;
    if (name == "mutable") return RepoBehavior::Mutable;
    if (name == "overwriting") return RepoBehavior::Overwriting;
    throw Error(ErrorCode::ConfigInvalid, "unknown repository behavior: " + std::string(name));
}

SimulatedRepo::SimulatedRepo(RepoBehavior behavior, std::string repository_id, Clock* clock)
    : behavior_(behavior), repository_id_(std::move(repository_id)),
      clock_(clock ? clock : &system_clock()) {}

std::string SimulatedRepo::link_for(const std::string& dataset_id, std::size_t version_number) const {
    std::string leaf = behavior_ == RepoBehavior::Mutable ? "data" : "v" + std::to_string(version_number);
    return std::string(kSimScheme) + repository_id_ + "/" + dataset_id + "/" + leaf;
}

std::string SimulatedRepo::landing_link(const std::string& dataset_id) const {
    return std::string(kSimScheme) + repository_id_ + "/" + dataset_id + "/landing";
}

std::string SimulatedRepo::link_path(const std::string& sim_link) {
    ParsedSimLink p = parse_sim_link(sim_link);
    return p.repo + "/" + p.dataset + "/" + p.leaf;
}

DatasetRef SimulatedRepo::register_dataset(const std::string& dataset_id, std::vector<FileEntry> files,
                                           std::optional<std::string> persistent_id) {
    std::lock_guard<std::mutex> lock(mu_);
    if (datasets_.count(dataset_id)) {
        throw Error(ErrorCode::DuplicatePath, "dataset already registered: " + dataset_id);
    }
    Dataset ds;
    ds.persistent_id = persistent_id;
    ds.versions.push_back(Version{"v1", std::move(files), clock_->now()});
    datasets_.emplace(dataset_id, std::move(ds));

    DatasetRef ref;
    ref.repository_id = repository_id_;
    ref.dataset_id = dataset_id;
    ref.landing_url = landing_link(dataset_id);
    ref.download_link = link_for(dataset_id, 1);
    ref.persistent_id = std::move(persistent_id);
    ref.version_label = "v1";
    return ref;
}

void SimulatedRepo::admin_replace(const std::string& dataset_id, std::vector<FileEntry> new_files) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = datasets_.find(dataset_id);
    if (it == datasets_.end() || it->second.withdrawn) {
        throw Error(ErrorCode::NotFound, "dataset not registered: " + dataset_id);
    }
    Dataset& ds = it->second;
    std::size_t next_number = 0;
    for (const auto& v : ds.versions) {
        next_number = std::max(next_number, static_cast<std::size_t>(std::stoul(v.label.substr(1))));
    }
    Version next{"v" + std::to_string(next_number + 1), std::move(new_files), clock_->now()};
    if (behavior_ == RepoBehavior::Overwriting) {
        ds.versions.clear();  // history destroyed; old links die
    }
    ds.versions.push_back(std::move(next));
}

void SimulatedRepo::admin_withdraw(const std::string& dataset_id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = datasets_.find(dataset_id);
    if (it == datasets_.end() || it->second.withdrawn) {
        throw Error(ErrorCode::NotFound, "dataset not registered: " + dataset_id);
    }
    it->second.withdrawn = true;
}

FetchResult SimulatedRepo::serve(const Dataset& ds, const Version& v, const std::string& link) {
    (void)ds;
    FetchResult result;
    result.source_link = link;
    result.fetched_at = clock_->now();

    if (behavior_ == RepoBehavior::TimestampZip) {
        // The fault: archive assembled at download time, current clock
        // stamped into entry metadata (2 s DOS resolution — drive with a
        // stepping clock of step >= 2 for deterministic divergence).
        std::vector<zip::BuildEntry> entries;
        for (const auto& f : v.files) entries.push_back({f.path, f.content});
        zip::BuildOptions opts;
        opts.dos_datetime = zip::dos_datetime_from_epoch(clock_->now());
        result.bytes = zip::build(entries, opts);
        result.media_type = "application/zip";
        return result;
    }

    if (v.files.size() == 1) {
        result.bytes = v.files.front().content;
        result.media_type = "application/octet-stream";
        return result;
    }
    std::vector<zip::BuildEntry> entries;
    for (const auto& f : v.files) entries.push_back({f.path, f.content});
    zip::BuildOptions opts;
    opts.dos_datetime = zip::dos_datetime_from_epoch(kFixedArchiveEpoch);
    result.bytes = zip::build(entries, opts);
    result.media_type = "application/zip";
    return result;
}

FetchResult SimulatedRepo::download(const std::string& link) {
    std::lock_guard<std::mutex> lock(mu_);
    ParsedSimLink parsed = parse_sim_link(link);
    if (parsed.repo != repository_id_) {
        throw Error(ErrorCode::NotFound, "link addresses a different repository: " + link);
    }
    auto it = datasets_.find(parsed.dataset);
    if (it == datasets_.end() || it->second.withdrawn) {
        throw Error(ErrorCode::NotFound, "dataset unavailable: " + parsed.dataset);
    }
    Dataset& ds = it->second;

    if (parsed.leaf == "landing") {
        FetchResult result;
        result.source_link = link;
        result.fetched_at = clock_->now();
        std::string page = "<html><body><h1>Dataset " + parsed.dataset + "</h1>";
        if (ds.persistent_id) page += "<p>persistent id: " + *ds.persistent_id + "</p>";
        page += "<p>versions: " + std::to_string(ds.versions.size()) + "</p></body></html>";
        result.bytes = std::move(page);
        result.media_type = "text/html";
        return result;
    }

    if (parsed.leaf == "data") {
        if (behavior_ != RepoBehavior::Mutable) {
            throw Error(ErrorCode::NotFound, "no such resource: " + link);
        }
        return serve(ds, ds.versions.back(), link);  // always the latest — the defect
    }

    if (parsed.leaf.size() > 1 && parsed.leaf[0] == 'v') {
        if (behavior_ == RepoBehavior::Mutable) {
            throw Error(ErrorCode::NotFound, "no such resource: " + link);
        }
        for (const auto& v : ds.versions) {
            if (v.label == parsed.leaf) return serve(ds, v, link);
        }
        throw Error(ErrorCode::NotFound, "version not retained: " + link);
    }
    throw Error(ErrorCode::NotFound, "no such resource: " + link);
}

std::vector<VersionInfo> SimulatedRepo::list_versions(const std::string& dataset_id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = datasets_.find(dataset_id);
    if (it == datasets_.end() || it->second.withdrawn) {
        throw Error(ErrorCode::NotFound, "dataset unavailable: " + dataset_id);
    }
    std::vector<VersionInfo> out;
    for (const auto& v : it->second.versions) {
        std::string leaf = behavior_ == RepoBehavior::Mutable ? "data" : v.label;
        out.push_back(VersionInfo{v.label,
                                  std::string(kSimScheme) + repository_id_ + "/" + dataset_id + "/" + leaf,
                                  v.created_at});
    }
    return out;
}

namespace {

bool same_content(const std::string& a, const std::string& b) {
    return content_identity(a).manifest == content_identity(b).manifest;
}

}  // namespace

RequirementReport check_repo_requirements(Connector& connector, const DatasetRef& ref,
                                          SimulatedRepo* admin) {
    RequirementCheck landing{"landing-page-accessible", false, ""};
    RequirementCheck pid{"persistent-identifier-present", false, ""};
    RequirementCheck unique{"unique-reviewed-link", false, ""};
    RequirementCheck prior{"prior-versions-accessible", false, ""};
    RequirementCheck open{"open-access-data", false, ""};

    try {
        FetchResult page = connector.download(ref.landing_url);
        landing.passed = true;
        landing.evidence = "landing page served " + std::to_string(page.bytes.size()) + " bytes";
    } catch (const Error& e) {
        landing.evidence = e.what();
    }

    pid.passed = ref.persistent_id.has_value() && !ref.persistent_id->empty();
    pid.evidence = pid.passed ? "persistent id: " + *ref.persistent_id : "no persistent identifier recorded";

    std::optional<std::string> reviewed_bytes;
    try {
        FetchResult data = connector.download(ref.download_link);
        open.passed = true;
        open.evidence = "download link served " + std::to_string(data.bytes.size()) + " bytes without credentials";
        reviewed_bytes = std::move(data.bytes);
    } catch (const Error& e) {
        open.evidence = e.what();
    }

    std::vector<VersionInfo> versions_before;
    bool listed_before = false;
    try {
        versions_before = connector.list_versions(ref.dataset_id);
        listed_before = true;
    } catch (const Error&) {
    }

    if (!reviewed_bytes) {
        unique.evidence = "not checkable: reviewed link did not serve data";
        prior.evidence = unique.evidence;
    } else if (admin) {
        // Behavioral probe: update the dataset, then observe what the
        // reviewed link and the version history do. Destructive — run
        // against a scratch dataset.
        try {
            admin->admin_replace(ref.dataset_id,
                                 {{"__conformance_probe__.txt", "conformance probe payload"}});
        } catch (const Error& e) {
            unique.evidence = std::string("update probe failed: ") + e.what();
        }

        try {
            FetchResult after = connector.download(ref.download_link);
            if (same_content(after.bytes, *reviewed_bytes)) {
                unique.passed = true;
                unique.evidence = "reviewed link still serves the reviewed content after an update";
            } else {
                unique.evidence = "reviewed link was reused: it now serves different content";
            }
        } catch (const Error&) {
            unique.passed = true;
            unique.evidence = "reviewed link retired (dead) after update; never reused for new content";
        }

        try {
            auto versions_after = connector.list_versions(ref.dataset_id);
            bool all_retained = listed_before && !versions_before.empty();
            std::string missing;
            for (const auto& v : versions_before) {
                auto found = std::find_if(versions_after.begin(), versions_after.end(),
                                          [&](const VersionInfo& w) { return w.version_label == v.version_label; });
                if (found == versions_after.end()) {
                    all_retained = false;
                    missing = v.version_label;
                    break;
                }
                FetchResult served = connector.download(found->download_link);
                if (v.version_label == ref.version_label.value_or("v1") &&
                    !same_content(served.bytes, *reviewed_bytes)) {
                    all_retained = false;
                    missing = v.version_label + " (content changed)";
                    break;
                }
            }
            prior.passed = all_retained;
            prior.evidence = all_retained
                                 ? "all " + std::to_string(versions_before.size()) +
                                       " pre-update versions remain listed and serve their original content"
                                 : "pre-update version lost after update: " + missing;
        } catch (const Error& e) {
            prior.evidence = std::string("version history unavailable: ") + e.what();
        }
    } else {
        // Observation-only mode: no admin handle, so no mutation. Re-fetch
        // and list what the repository exposes.
        try {
            FetchResult again = connector.download(ref.download_link);
            unique.passed = same_content(again.bytes, *reviewed_bytes);
            unique.evidence = unique.passed
                                  ? "observation only: repeated fetches of the reviewed link agree"
                                  : "repeated fetches of the reviewed link serve different content";
        } catch (const Error& e) {
            unique.evidence = std::string("observation only: re-fetch failed: ") + e.what();
        }
        if (listed_before && !versions_before.empty()) {
            prior.passed = true;
            for (const auto& v : versions_before) {
                try {
                    connector.download(v.download_link);
                } catch (const Error&) {
                    prior.passed = false;
                    prior.evidence = "listed version not downloadable: " + v.version_label;
                    break;
                }
            }
            if (prior.passed) {
                prior.evidence = "observation only: " + std::to_string(versions_before.size()) +
                                 " listed versions all downloadable";
            }
        } else {
            prior.evidence = "version history unavailable from this connector";
        }
    }

    RequirementReport report;
    report.checks = {landing, pid, unique, prior, open};
    report.overall = true;
    for (const auto& c : report.checks) report.overall = report.overall && c.passed;
    return report;
}

}  // namespace fixrev
