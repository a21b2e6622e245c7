#include <doctest.h>
#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <thread>

#include "fixrev/errors.hpp"
#include "fixrev/http_facade.hpp"
#include "fixrev/http_fetch.hpp"
#include "fixrev/repository.hpp"
#include "fixrev/stability.hpp"
#include "fixrev/zip.hpp"

using namespace fixrev;

namespace {

std::vector<FileEntry> sample_files() {
    return {{"obs.csv", "t,v\n1,0.5\n2,0.7\n"}, {"readme.txt", "polar observations"}};
}

std::vector<FileEntry> replacement_files() {
    return {{"obs.csv", "t,v\n1,0.5\n2,0.9\n"}, {"readme.txt", "corrected observations"}};
}

}  // namespace

TEST_CASE("faithful repo serves registered bytes verbatim") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::Faithful, "repo-a", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:10.9999/sim.ds1");

    FetchResult first = repo.download(ref.download_link);
    FetchResult second = repo.download(ref.download_link);
    CHECK(first.bytes == second.bytes);
    CHECK(content_identity(first.bytes).manifest == build_manifest(sample_files()));

    SUBCASE("single-file datasets are served raw") {
        DatasetRef single = repo.register_dataset("ds2", {{"data.bin", "raw payload"}});
        CHECK(repo.download(single.download_link).bytes == "raw payload");
    }
    SUBCASE("landing page resolves") {
        CHECK(repo.download(ref.landing_url).bytes.find("ds1") != std::string::npos);
    }
    SUBCASE("unknown links are NotFound") {
        CHECK_THROWS_AS(repo.download("sim://repo-a/ds1/v9"), Error);
        CHECK_THROWS_AS(repo.download("sim://repo-a/nope/v1"), Error);
    }
}

TEST_CASE("faithful repo retains versions; replaced link still serves old bytes") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::Faithful, "repo-a", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files());
    std::string original = repo.download(ref.download_link).bytes;

    repo.admin_replace("ds1", replacement_files());
    auto versions = repo.list_versions("ds1");
    REQUIRE(versions.size() == 2);
    CHECK(versions[0].version_label == "v1");
    CHECK(versions[1].version_label == "v2");
    CHECK(repo.download(ref.download_link).bytes == original);  // reviewed link untouched
    CHECK(content_identity(repo.download(versions[1].download_link).bytes).manifest ==
          build_manifest(replacement_files()));
}

TEST_CASE("timestamp-zip repo: raw digests differ, content manifests agree") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::TimestampZip, "repo-b", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files());

    std::string a = repo.download(ref.download_link).bytes;
    std::string b = repo.download(ref.download_link).bytes;
    CHECK(digest_bytes(a) != digest_bytes(b));
    CHECK(normalize_archive(a, ArchiveFormat::Zip) == normalize_archive(b, ArchiveFormat::Zip));
    CHECK(normalize_archive(a, ArchiveFormat::Zip) == build_manifest(sample_files()));

    StabilityResult probe = probe_stability(
        [&](int) { return repo.download(ref.download_link).bytes; }, 2);
    CHECK(probe.verdict == StabilityVerdict::ContainerNondeterminism);
}

TEST_CASE("timestamp-zip content manifests stay equal across many fetches") {
    // Property over randomized payloads with an injected clock.
    SteppingClock clock(1600000000, 7200);
    SimulatedRepo repo(RepoBehavior::TimestampZip, "repo-b", &clock);
    for (int trial = 0; trial < 10; ++trial) {
        std::string id = "ds" + std::to_string(trial);
        std::vector<FileEntry> files{{"f1", std::string(10 + trial * 13, 'x')},
                                     {"f2/g", "payload " + std::to_string(trial)}};
        DatasetRef ref = repo.register_dataset(id, files);
        StabilityResult probe = probe_stability(
            [&](int) { return repo.download(ref.download_link).bytes; }, 3);
        CHECK(probe.verdict == StabilityVerdict::ContainerNondeterminism);
        for (const auto& m : probe.content_manifests) {
            CHECK(m == build_manifest(files));
        }
    }
}

TEST_CASE("mutable repo silently swaps served content") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::Mutable, "repo-c", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files());
    std::string before = repo.download(ref.download_link).bytes;

    repo.admin_replace("ds1", replacement_files());
    std::string after = repo.download(ref.download_link).bytes;
    CHECK(digest_bytes(before) != digest_bytes(after));
    CHECK(content_identity(after).manifest == build_manifest(replacement_files()));

    SUBCASE("withdraw kills the link") {
        repo.admin_withdraw("ds1");
        CHECK_THROWS_AS(repo.download(ref.download_link), Error);
        try {
            repo.download(ref.download_link);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotFound);
        }
    }
    SUBCASE("content replaced between probe fetches is ContentDrift") {
        SimulatedRepo drifting(RepoBehavior::Mutable, "repo-d", &clock);
        DatasetRef dref = drifting.register_dataset("ds1", sample_files());
        StabilityResult probe = probe_stability(
            [&](int attempt) {
                if (attempt == 2) drifting.admin_replace("ds1", replacement_files());
                return drifting.download(dref.download_link).bytes;
            },
            2);
        CHECK(probe.verdict == StabilityVerdict::ContentDrift);
    }
}

TEST_CASE("overwriting repo discards history") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::Overwriting, "repo-e", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files());
    repo.admin_replace("ds1", replacement_files());

    auto versions = repo.list_versions("ds1");
    REQUIRE(versions.size() == 1);
    CHECK(versions[0].version_label == "v2");
    CHECK_THROWS_AS(repo.download(ref.download_link), Error);  // v1 unrecoverable
}

TEST_CASE("admin ops on missing datasets are NotFound") {
    SimulatedRepo repo(RepoBehavior::Faithful, "repo-a");
    CHECK_THROWS_AS(repo.admin_replace("ghost", sample_files()), Error);
    CHECK_THROWS_AS(repo.admin_withdraw("ghost"), Error);
    CHECK_THROWS_AS(repo.list_versions("ghost"), Error);
}

TEST_CASE("never-updated dataset lists exactly one version") {
    SimulatedRepo repo(RepoBehavior::Faithful, "repo-a");
    repo.register_dataset("ds1", sample_files());
    CHECK(repo.list_versions("ds1").size() == 1);
}

TEST_CASE("repository conformance checks") {
    SteppingClock clock(1704067200, 60);

    SUBCASE("faithful repo with a persistent id passes everything") {
        SimulatedRepo repo(RepoBehavior::Faithful, "repo-a", &clock);
        DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:10.9999/sim.ds1");
        RequirementReport report = check_repo_requirements(repo, ref, &repo);
        CHECK(report.overall);
        REQUIRE(report.checks.size() == 5);
        CHECK(report.checks[0].name == "landing-page-accessible");
        CHECK(report.checks[1].name == "persistent-identifier-present");
        CHECK(report.checks[2].name == "unique-reviewed-link");
        CHECK(report.checks[3].name == "prior-versions-accessible");
        CHECK(report.checks[4].name == "open-access-data");
    }
    SUBCASE("overwriting repo fails prior-versions-accessible") {
        SimulatedRepo repo(RepoBehavior::Overwriting, "repo-e", &clock);
        DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:10.9999/sim.ds1");
        RequirementReport report = check_repo_requirements(repo, ref, &repo);
        CHECK(!report.overall);
        for (const auto& c : report.checks) {
            if (c.name == "prior-versions-accessible") CHECK(!c.passed);
            if (c.name == "unique-reviewed-link") CHECK(c.passed);  // old link dies, never reused
        }
    }
    SUBCASE("mutable repo fails unique-reviewed-link") {
        SimulatedRepo repo(RepoBehavior::Mutable, "repo-c", &clock);
        DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:10.9999/sim.ds1");
        RequirementReport report = check_repo_requirements(repo, ref, &repo);
        CHECK(!report.overall);
        for (const auto& c : report.checks) {
            if (c.name == "unique-reviewed-link") CHECK(!c.passed);
        }
    }
    SUBCASE("missing persistent id fails that check only on a faithful repo") {
        SimulatedRepo repo(RepoBehavior::Faithful, "repo-a", &clock);
        DatasetRef ref = repo.register_dataset("ds1", sample_files());
        RequirementReport report = check_repo_requirements(repo, ref, &repo);
        CHECK(!report.overall);
        int failed = 0;
        for (const auto& c : report.checks) {
            if (!c.passed) {
                ++failed;
                CHECK(c.name == "persistent-identifier-present");
            }
        }
        CHECK(failed == 1);
    }
    SUBCASE("timestamp-zip passes unique-link via content comparison") {
        SimulatedRepo repo(RepoBehavior::TimestampZip, "repo-b", &clock);
        DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:x");
        RequirementReport report = check_repo_requirements(repo, ref, &repo);
        for (const auto& c : report.checks) {
            if (c.name == "unique-reviewed-link") CHECK(c.passed);
            if (c.name == "prior-versions-accessible") CHECK(c.passed);
        }
    }
}

TEST_CASE("http facade exposes the same behaviors over loopback") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::TimestampZip, "repo-b", &clock);
    DatasetRef ref = repo.register_dataset("ds1", sample_files(), "doi:x");
    HttpFacade facade(repo);
    std::string url = facade.http_link(ref.download_link);

    FetchResult a = http_fetch(url);
    FetchResult b = http_fetch(url);
    CHECK(digest_bytes(a.bytes) != digest_bytes(b.bytes));
    CHECK(normalize_archive(a.bytes, ArchiveFormat::Zip) == normalize_archive(b.bytes, ArchiveFormat::Zip));
    CHECK(a.media_type.value_or("") == "application/zip");

    SUBCASE("withdrawn dataset maps to NotFound over http") {
        repo.admin_withdraw("ds1");
        try {
            http_fetch(url);
            FAIL("expected NotFound");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotFound);
        }
    }
}

TEST_CASE("http_fetch limit handling") {
    SteppingClock clock(1704067200, 60);
    SimulatedRepo repo(RepoBehavior::Faithful, "repo-a", &clock);
    repo.register_dataset("ds1", {{"data.bin", std::string(4096, 'x')}});
    HttpFacade facade(repo);
    std::string url = facade.http_link("sim://repo-a/ds1/v1");

    SUBCASE("fixed bytes round-trip") {
        CHECK(http_fetch(url).bytes == std::string(4096, 'x'));
    }
    SUBCASE("max_bytes aborts with TooLarge") {
        FetchLimits limits;
        limits.max_bytes = 1024;
        try {
            http_fetch(url, limits);
            FAIL("expected TooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TooLarge);
        }
    }
    SUBCASE("unreachable host is a transport error") {
        FetchLimits limits;
        limits.timeout_ms = 500;
        try {
            http_fetch("http://127.0.0.1:1/none", limits);
            FAIL("expected transport error");
        } catch (const Error& e) {
            bool transportish = e.code() == ErrorCode::TransportError || e.code() == ErrorCode::Timeout;
            CHECK(transportish);
        }
    }
}

TEST_CASE("http_fetch follows redirects up to the limit") {
    httplib::Server server;
    server.Get("/start", [](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/hop1");
    });
    server.Get("/hop1", [](const httplib::Request&, httplib::Response& res) {
        res.set_redirect("/hop2");
    });
    server.Get("/hop2", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("arrived", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    std::string base = "http://127.0.0.1:" + std::to_string(port);

    CHECK(http_fetch(base + "/start").bytes == "arrived");

    FetchLimits tight;
    tight.max_redirects = 1;
    try {
        http_fetch(base + "/start", tight);
        FAIL("expected TooManyRedirects");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManyRedirects);
    }

    server.stop();
    worker.join();
}

TEST_CASE("file_fetch reads local files and reports missing ones") {
    std::string path = "/tmp/fixrev_file_fetch_test.bin";
    {
        std::ofstream out(path, std::ios::binary);
        out << "local payload";
    }
    CHECK(fetch_link("file://" + path).bytes == "local payload");
    try {
        fetch_link("file:///tmp/definitely_missing_fixrev_file");
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFound);
    }
    std::remove(path.c_str());
}
