#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fixrev/errors.hpp"
#include "fixrev/http_facade.hpp"
#include "fixrev/http_fetch.hpp"
#include "fixrev/report.hpp"
#include "fixrev/scenario.hpp"
#include "fixrev/workflow.hpp"
#include "fixrev/zip.hpp"

namespace py = pybind11;
using namespace fixrev;

namespace {

std::vector<FileEntry> files_from_pairs(const std::vector<std::pair<std::string, py::bytes>>& files) {
    std::vector<FileEntry> out;
    out.reserve(files.size());
    for (const auto& [path, content] : files) {
        out.push_back({path, std::string(content)});
    }
    return out;
}

py::dict manifest_to_dict(const HashManifest& m) {
    py::list entries;
    for (const auto& e : m.entries()) {
        entries.append(py::make_tuple(e.path, e.digest.hex(), e.size));
    }
    py::dict out;
    out["entries"] = entries;
    out["manifest_digest"] = m.manifest_digest().hex();
    out["canonical_text"] = m.canonical_text();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core operations of the fixity-review integrity engine";

    py::register_exception<Error>(m, "EngineError");

    m.def(
        "digest_bytes", [](py::bytes data) { return digest_bytes(std::string(data)).hex(); },
        py::arg("data"), "SHA-256 of the input as lowercase hex");

    m.def(
        "build_manifest",
        [](const std::vector<std::pair<std::string, py::bytes>>& files) {
            return manifest_to_dict(build_manifest(files_from_pairs(files)));
        },
        py::arg("files"), "Canonical multi-file manifest from (path, bytes) pairs");

    m.def(
        "normalize_archive",
        [](py::bytes archive) {
            return manifest_to_dict(normalize_archive(std::string(archive), ArchiveFormat::Zip));
        },
        py::arg("archive"), "Manifest over a ZIP archive's contents, container metadata ignored");

    m.def(
        "build_zip",
        [](const std::vector<std::pair<std::string, py::bytes>>& files, std::int64_t epoch_seconds,
           int compression_level) {
            std::vector<zip::BuildEntry> entries;
            for (const auto& [path, content] : files) entries.push_back({path, std::string(content)});
            zip::BuildOptions opts;
            opts.dos_datetime = zip::dos_datetime_from_epoch(epoch_seconds);
            opts.compression_level = compression_level;
            return py::bytes(zip::build(entries, opts));
        },
        py::arg("files"), py::arg("epoch_seconds") = 315532800, py::arg("compression_level") = 6,
        "Deterministic ZIP archive with the given entry timestamp");

    py::class_<SteppingClock>(m, "SteppingClock")
        .def(py::init<std::int64_t, std::int64_t>(), py::arg("start"), py::arg("step") = 60)
        .def("now", &SteppingClock::now);

    py::class_<DatasetRef>(m, "DatasetRef")
        .def_readonly("repository_id", &DatasetRef::repository_id)
        .def_readonly("dataset_id", &DatasetRef::dataset_id)
        .def_readonly("landing_url", &DatasetRef::landing_url)
        .def_readonly("download_link", &DatasetRef::download_link)
        .def_property_readonly("persistent_id",
                               [](const DatasetRef& r) { return r.persistent_id.value_or(""); });

    py::class_<SimulatedRepo>(m, "SimulatedRepo")
        .def(py::init([](const std::string& behavior, const std::string& repo_id,
                         SteppingClock* clock) {
                 return new SimulatedRepo(repo_behavior_from_string(behavior), repo_id, clock);
             }),
             py::arg("behavior"), py::arg("repository_id") = "repo-sim", py::arg("clock") = nullptr,
             py::keep_alive<1, 4>())
        .def(
            "register_dataset",
            [](SimulatedRepo& self, const std::string& id,
               const std::vector<std::pair<std::string, py::bytes>>& files,
               const std::string& persistent_id) {
                std::optional<std::string> pid;
                if (!persistent_id.empty()) pid = persistent_id;
                return self.register_dataset(id, files_from_pairs(files), pid);
            },
            py::arg("dataset_id"), py::arg("files"), py::arg("persistent_id") = "")
        .def(
            "admin_replace",
            [](SimulatedRepo& self, const std::string& id,
               const std::vector<std::pair<std::string, py::bytes>>& files) {
                self.admin_replace(id, files_from_pairs(files));
            },
            py::arg("dataset_id"), py::arg("files"))
        .def("admin_withdraw", &SimulatedRepo::admin_withdraw, py::arg("dataset_id"))
        .def(
            "download", [](SimulatedRepo& self, const std::string& link) {
                return py::bytes(self.download(link).bytes);
            },
            py::arg("link"))
        .def(
            "list_versions",
            [](SimulatedRepo& self, const std::string& dataset_id) {
                py::list out;
                for (const auto& v : self.list_versions(dataset_id)) {
                    out.append(py::make_tuple(v.version_label, v.download_link, v.created_at));
                }
                return out;
            },
            py::arg("dataset_id"));

    m.def(
        "probe_stability",
        [](SimulatedRepo& repo, const std::string& link, int n) {
            StabilityResult r = probe_stability(
                [&](int) { return repo.download(link).bytes; }, n);
            py::list raw;
            for (const auto& d : r.raw_digests) raw.append(d.hex());
            py::list manifests;
            for (const auto& mm : r.content_manifests) manifests.append(mm.manifest_digest().hex());
            py::dict out;
            out["verdict"] = std::string(to_string(r.verdict));
            out["raw_digests"] = raw;
            out["content_manifest_digests"] = manifests;
            return out;
        },
        py::arg("repo"), py::arg("link"), py::arg("n") = 2,
        "Fetch the link n times and judge Stable / ContainerNondeterminism / ContentDrift");

    m.def(
        "check_repo_requirements",
        [](SimulatedRepo& repo, const DatasetRef& ref) {
            RequirementReport report = check_repo_requirements(repo, ref, &repo);
            py::list checks;
            for (const auto& c : report.checks) {
                checks.append(py::make_tuple(c.name, c.passed, c.evidence));
            }
            py::dict out;
            out["overall"] = report.overall;
            out["checks"] = checks;
            return out;
        },
        py::arg("repo"), py::arg("dataset_ref"),
        "Behavioral conformance of a repository against the journal's requirements");

    m.def(
        "run_scenario",
        [](const std::string& script_json) {
            ScenarioResult result = run_scenario_text(script_json);
            py::dict out;
            out["summary"] = result.summary.dump();
            out["expectations_ok"] = result.expectations_ok;
            out["failures"] = result.failures;
            out["report"] = py::bytes(result.report_bytes);
            return out;
        },
        py::arg("script_json"), "Execute a scenario script and return its summary");

    m.def(
        "verify_report",
        [](py::bytes report_bytes, const std::string& mode) {
            PeerReviewReport report = parse_report(std::string(report_bytes));
            FetchLimits limits;
            VerificationOutcome out = verify_against_report(
                report,
                [&]() { return fetch_link(report.data_section.permanent_link, limits).bytes; },
                mode == "strict" ? VerifyMode::Strict : VerifyMode::ContentNormalized);
            return std::string(to_string(out.verdict));
        },
        py::arg("report_bytes"), py::arg("mode") = "content-normalized",
        "Fetch a report's permanent link and compare digests");

    m.def(
        "verify_report_against",
        [](py::bytes report_bytes, SimulatedRepo& repo, const std::string& mode) {
            PeerReviewReport report = parse_report(std::string(report_bytes));
            VerificationOutcome out = verify_against_report(
                report, repo, mode == "strict" ? VerifyMode::Strict : VerifyMode::ContentNormalized);
            return std::string(to_string(out.verdict));
        },
        py::arg("report_bytes"), py::arg("repo"), py::arg("mode") = "content-normalized",
        "Verify a report against an in-process simulated repository");

    m.def("table_categories", [] {
        py::list out;
        for (const auto& info : all_categories()) {
            py::dict row;
            row["slug"] = std::string(info.slug);
            row["label"] = std::string(info.label);
            row["role"] = std::string(role_label(info.role));
            row["flow_ref"] = std::string(info.flow_ref);
            row["measure"] = std::string(measure_label(info.measure));
            row["detectable"] = info.detectable;
            row["table_row"] = info.table_row;
            out.append(row);
        }
        return out;
    });
}
