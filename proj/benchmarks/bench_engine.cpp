// Microbenchmarks for the hot paths: encoders, composite assembly, graph
// insert/search, exact scan, and windowed ingest.
//
// Run the binary directly (it is not part of ctest); standard
// google-benchmark flags apply, e.g. --benchmark_filter=Search.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "spatcode/ann.hpp"
#include "spatcode/composite.hpp"
#include "spatcode/dataset.hpp"
#include "spatcode/encoding.hpp"
#include "spatcode/record.hpp"
#include "spatcode/retrieval.hpp"
#include "spatcode/rng.hpp"
#include "spatcode/vecmath.hpp"
#include "spatcode/window.hpp"

namespace {

using namespace spatcode;

const ModalitySchema& bench_schema() {
    static const ModalitySchema schema({32, 32});
    return schema;
}

AnnConfig bench_ann() {
    AnnConfig config;
    config.dim = bench_schema().total_dim();
    config.max_neighbors = 24;
    config.ef_construction = 200;
    config.default_ef_search = 100;
    config.fragmentation_threshold = 0.0;  // no auto-compaction mid-benchmark
    config.seed = 7;
    return config;
}

std::vector<StreamRecord> bench_corpus(std::size_t n) {
    DatasetConfig data;
    data.record_count = n;
    data.time_start = 0.0;
    data.time_span_seconds = 6.0 * 2'592'000.0;
    data.seed = 99;
    return generate_dataset(bench_schema(), data);
}

// Corpus, composites and a built graph shared by the search benchmarks;
// constructed once on first use so setup cost stays out of the timings.
struct SearchFixture {
    std::vector<StreamRecord> corpus;
    std::vector<CompositeVector> composites;
    HnswIndex index;
    std::vector<QueryProfile> profiles;

    SearchFixture() : corpus(bench_corpus(20'000)), index(bench_ann()) {
        const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
        composites.reserve(corpus.size());
        for (const auto& record : corpus) {
            composites.push_back(encode_record(bench_schema(), record, scale));
            index.insert(composites.back().values, record.id);
        }
        QueryGenConfig queries;
        queries.count = 64;
        queries.k = 10;
        queries.time_lo = 0.0;
        queries.time_hi = 6.0 * 2'592'000.0;
        queries.seed = 100;
        profiles = generate_queries(bench_schema(), corpus, queries);
    }

    static const SearchFixture& instance() {
        static const SearchFixture fixture;
        return fixture;
    }
};

void BM_EncodeTime(benchmark::State& state) {
    const TemporalScale scale = scale_for_resolution({1e-6, 14'400.0, 6371.0});
    double t = 0.0;
    for (auto _ : state) {
        t += 1234.5;
        benchmark::DoNotOptimize(encode_time(t, scale));
    }
}
BENCHMARK(BM_EncodeTime);

void BM_EncodeGeo(benchmark::State& state) {
    Rng rng(5);
    std::vector<GeoCoordinate> coords;
    for (int i = 0; i < 1024; ++i) {
        coords.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-3.1, 3.1)});
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_geo(coords[i++ & 1023]));
    }
}
BENCHMARK(BM_EncodeGeo);

void BM_ComposeRecord(benchmark::State& state) {
    const auto corpus = bench_corpus(1024);
    const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_record(bench_schema(), corpus[i++ & 1023], scale));
    }
}
BENCHMARK(BM_ComposeRecord);

void BM_FusedDot(benchmark::State& state) {
    const auto& fixture = SearchFixture::instance();
    const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
    const auto query_vector =
        build_query_vector(bench_schema(), fixture.profiles.front(), scale);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& composite = fixture.composites[i++ % fixture.composites.size()];
        benchmark::DoNotOptimize(dot(query_vector, composite.values));
    }
}
BENCHMARK(BM_FusedDot);

void BM_HnswInsert(benchmark::State& state) {
    const auto corpus = bench_corpus(static_cast<std::size_t>(state.range(0)));
    const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
    std::vector<std::vector<double>> composites;
    composites.reserve(corpus.size());
    for (const auto& record : corpus) {
        composites.push_back(encode_record(bench_schema(), record, scale).values);
    }
    for (auto _ : state) {
        HnswIndex index(bench_ann());
        for (std::size_t i = 0; i < composites.size(); ++i) {
            index.insert(composites[i], corpus[i].id);
        }
        benchmark::DoNotOptimize(index.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HnswInsert)->Arg(1'000)->Arg(5'000)->Unit(benchmark::kMillisecond);

void BM_HnswSearch(benchmark::State& state) {
    const auto& fixture = SearchFixture::instance();
    const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
    const int ef = static_cast<int>(state.range(0));
    std::vector<std::vector<double>> query_vectors;
    for (const auto& profile : fixture.profiles) {
        query_vectors.push_back(build_query_vector(bench_schema(), profile, scale));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& q = query_vectors[i++ % query_vectors.size()];
        benchmark::DoNotOptimize(fixture.index.search(q, 10, ef));
    }
}
BENCHMARK(BM_HnswSearch)->Arg(10)->Arg(40)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_ExactScan(benchmark::State& state) {
    const auto& fixture = SearchFixture::instance();
    const TemporalScale scale = WindowConfig{2'592'000.0, 6, 0.0, false}.scale();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& profile = fixture.profiles[i++ % fixture.profiles.size()];
        benchmark::DoNotOptimize(exact_topk(profile, fixture.corpus, bench_schema(), scale));
    }
}
BENCHMARK(BM_ExactScan)->Unit(benchmark::kMillisecond);

void BM_WindowIngest(benchmark::State& state) {
    const auto corpus = bench_corpus(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        WindowConfig config{2'592'000.0, 6, 0.0, false};
        SlidingWindow window(config, bench_schema());
        HnswIndex index(bench_ann());
        for (const auto& record : corpus) {
            window.advance(record.time, index);
            window.ingest(record, index);
        }
        benchmark::DoNotOptimize(window.live_count());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WindowIngest)->Arg(2'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
