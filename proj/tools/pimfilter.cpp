// pimfilter command-line driver: filter, validate, model, synth, gates

#include <pimfilter/genome_map.hpp>
#include <pimfilter/io/candidates.hpp>
#include <pimfilter/io/fasta.hpp>
#include <pimfilter/io/results.hpp>
#include <pimfilter/io/synth.hpp>
#include <pimfilter/io/text.hpp>
#include <pimfilter/kernel.hpp>
#include <pimfilter/magic/selftest.hpp>
#include <pimfilter/oracle.hpp>
#include <pimfilter/perf_model.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

using namespace pimfilter;

namespace
{

struct geometry_flags
{
  uint32_t read_length = 100u;
  uint32_t fragments = 65u;
  uint32_t rows = 128u;
  uint32_t cols = 256u;

  void add( CLI::App* app )
  {
    app->add_option( "--read-length", read_length, "bases per read and per fragment" )->capture_default_str();
    app->add_option( "--fragments", fragments, "read-size fragments stored per crossbar" )->capture_default_str();
    app->add_option( "--rows", rows, "crossbar rows" )->capture_default_str();
    app->add_option( "--cols", cols, "crossbar columns" )->capture_default_str();
  }

  kernel_geometry get() const { return { read_length, fragments, rows, cols }; }
};

std::ifstream open_in( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw std::runtime_error( "cannot open " + path );
  return in;
}

std::ofstream open_out( std::string const& path )
{
  std::ofstream out( path );
  if ( !out )
    throw std::runtime_error( "cannot write " + path );
  return out;
}

/* ---------------------------------------------------------------- filter */

struct filter_cmd
{
  std::string genome_path, candidates_path, out_path = "-", trace_path;
  geometry_flags geo;
  filter_config cfg;
  double power_budget = 0.0;
  bool permissive = false;
  bool raw_histograms = false;

  void add( CLI::App& root )
  {
    auto* app = root.add_subcommand( "filter", "filter candidate locations on simulated crossbars" );
    app->add_option( "--genome", genome_path, "reference FASTA" )->required()->check( CLI::ExistingFile );
    app->add_option( "--candidates", candidates_path, "read_id<TAB>read<TAB>position" )->required()->check( CLI::ExistingFile );
    app->add_option( "-o,--out", out_path, "results TSV ('-' for stdout)" )->capture_default_str();
    app->add_option( "--eth", cfg.eth, "edit threshold" )->capture_default_str();
    app->add_option( "--iter-factor", cfg.iter_factor, "per-tile cap as a multiple of the mean queue length" )
        ->capture_default_str()
        ->check( CLI::PositiveNumber );
    app->add_option( "--active-limit", cfg.active_limit, "arrays active per wave (0: all)" )->capture_default_str();
    app->add_option( "--power-budget", power_budget, "watts; caps active arrays at 1,000 per watt (0: off)" );
    app->add_option( "--threads", cfg.threads, "worker threads" )->capture_default_str()->check( CLI::PositiveNumber );
    app->add_flag( "--permissive", permissive, "conditional-switching NOR semantics instead of strict checks" );
    app->add_flag( "--raw-histograms", raw_histograms, "read field holds A,T,G,C counts" );
    app->add_option( "--trace", trace_path, "write every executed micro-op to this file" );
    geo.add( app );
    app->callback( [this] { run(); } );
  }

  void run()
  {
    cfg.geometry = geo.get();
    cfg.mode = permissive ? magic::exec_mode::permissive : magic::exec_mode::strict;
    auto gin = open_in( genome_path );
    auto const genome = io::parse_fasta( gin );
    auto cin = open_in( candidates_path );
    auto const candidates = io::parse_candidates( cin, { cfg.geometry.read_length, raw_histograms } );

    if ( power_budget > 0.0 )
    {
      auto const tiles = tile_count( genome.size(), cfg.geometry );
      auto const requested = cfg.active_limit == 0u ? tiles : cfg.active_limit;
      cfg.active_limit = static_cast<std::size_t>(
          power_constrained_arrays( { 1.0, power_budget }, static_cast<double>( requested ) ) );
      if ( cfg.active_limit == 0u )
        throw std::runtime_error( "power budget allows no active arrays" );
    }
    std::unique_ptr<std::ofstream> trace;
    if ( !trace_path.empty() )
    {
      trace = std::make_unique<std::ofstream>( open_out( trace_path ) );
      cfg.trace = trace.get();
    }

    auto const run = run_filter( genome.sequence, candidates, cfg );
    if ( out_path == "-" )
      io::emit_results( std::cout, candidates, run );
    else
    {
      auto out = open_out( out_path );
      io::emit_results( out, candidates, run );
    }
  }
};

/* -------------------------------------------------------------- validate */

struct validate_cmd
{
  std::size_t trials = 1000u;
  uint64_t seed = 1u;
  uint32_t max_eth = 20u;
  bool permissive = false;

  void add( CLI::App& root )
  {
    auto* app = root.add_subcommand( "validate", "randomized kernel-vs-oracle cross-check" );
    app->add_option( "--trials", trials, "random (window, read, eth) triples" )->capture_default_str();
    app->add_option( "--seed", seed, "random seed" )->capture_default_str();
    app->add_option( "--max-eth", max_eth, "eth is drawn from [0, max-eth]" )->capture_default_str();
    app->add_flag( "--permissive", permissive, "conditional-switching NOR semantics" );
    app->callback( [this] { run(); } );
  }

  void run()
  {
    auto const layout = make_kernel_layout();
    auto const& g = layout.geometry;
    io::synth_rng rng( seed );
    auto const genome = io::random_genome( g.span(), rng );
    filter_tile xb( layout );
    xb.load( genome );
    magic::execution_options opts{ permissive ? magic::exec_mode::permissive : magic::exec_mode::strict, nullptr };

    std::size_t mismatches = 0;
    for ( std::size_t t = 0; t < trials; ++t )
    {
      auto const offset = static_cast<uint32_t>( rng.below( g.max_offset() + 1u ) );
      auto const window = std::string_view( genome ).substr( offset, g.read_length );
      /* half of the reads are edited copies of the window, so decisions near the threshold are common */
      std::string read;
      if ( rng.below( 2u ) == 0u )
        read = io::mutate_window( genome, offset, g.read_length, static_cast<uint32_t>( rng.below( 2u * max_eth + 2u ) ), rng ).seq;
      else
        read = io::random_genome( g.read_length, rng );
      auto const eth = static_cast<uint32_t>( rng.below( max_eth + 1u ) );
      auto const r = xb.run( read_histogram( oracle::histogram( read ) ), offset, eth, opts );
      if ( r.discard != oracle::should_discard( read, window, eth ) )
        ++mismatches;
    }
    std::cout << mismatches << " mismatches\n";
    if ( mismatches )
      throw CLI::RuntimeError( 1 );
  }
};

/* ----------------------------------------------------------------- model */

struct model_cmd
{
  bool full_genome = false;
  std::string curve_path;
  double power_budget = 0.0;
  double cycles_per_iteration = 0.0;
  double iter_factor = 0.0;
  bool measure = false;

  void add( CLI::App& root )
  {
    auto* app = root.add_subcommand( "model", "analytic latency and throughput model" );
    app->add_flag( "--full-genome", full_genome, "full-genome breakdown with the five-fold iteration factor" );
    app->add_option( "--curve", curve_path, "write latency vs arrays TSV ('-' for stdout), balanced load" );
    app->add_option( "--power-budget", power_budget, "watts available to the arrays" );
    app->add_option( "--cycles-per-iteration", cycles_per_iteration, "override the 3,000-cycle iteration" );
    app->add_option( "--iter-factor", iter_factor, "override the iteration factor of every mode" );
    app->add_flag( "--measure", measure, "use the simulated kernel's cycles per iteration" );
    app->callback( [this] { run(); } );
  }

  static void print( latency_breakdown const& b )
  {
    std::cout << "arrays\t" << io::format_fixed( b.arrays, 0 ) << '\n'
              << "compute_s\t" << io::format_fixed( b.compute_s, 3 ) << '\n'
              << "transferred_gb\t" << io::format_fixed( b.bytes / 1e9, 3 ) << '\n'
              << "transfer_s\t" << io::format_fixed( b.transfer_s, 3 ) << '\n'
              << "total_s\t" << io::format_fixed( b.total_s, 3 ) << '\n'
              << "speedup_compute\t" << io::format_fixed( b.speedup_compute, 2 ) << '\n'
              << "speedup_transfer\t" << io::format_fixed( b.speedup_transfer, 2 ) << '\n'
              << "speedup_total\t" << io::format_fixed( b.speedup_total, 2 ) << '\n';
  }

  void adjust( perf_params& p, double measured ) const
  {
    if ( measured > 0.0 )
      p.cycles_per_iteration = measured;
    if ( cycles_per_iteration > 0.0 )
      p.cycles_per_iteration = cycles_per_iteration;
    if ( iter_factor > 0.0 )
      p.iter_factor = iter_factor;
  }

  static double measured_cycles()
  {
    auto const layout = make_kernel_layout();
    io::synth_rng rng( 1u );
    auto const genome = io::random_genome( layout.geometry.span(), rng );
    filter_tile xb( layout );
    xb.load( genome );
    uint64_t worst = 0;
    for ( uint32_t offset : { 0u, 50u, 6400u } )
    {
      auto const read = io::random_genome( layout.geometry.read_length, rng );
      worst = std::max( worst, xb.run( read_histogram( oracle::histogram( read ) ), offset, 5u ).total_cycles() );
    }
    return static_cast<double>( worst );
  }

  void run()
  {
    auto const measured = measure ? measured_cycles() : 0.0;
    if ( measure )
      std::cout << "measured_cycles_per_iteration\t" << io::format_number( measured ) << '\n';
    bool const any = full_genome || !curve_path.empty() || power_budget > 0.0;

    auto worst = perf_params::worst_case();
    adjust( worst, measured );
    if ( full_genome || !any )
    {
      std::cout << "# full genome (iteration factor " << io::format_number( worst.iter_factor ) << ")\n";
      print( total_latency( worst, worst.crossbars ) );
    }
    if ( power_budget > 0.0 )
    {
      auto const allowed = power_constrained_arrays( { 1.0, power_budget }, worst.crossbars );
      auto const full = total_latency( worst, worst.crossbars );
      auto const throttled = total_latency( worst, allowed );
      std::cout << "# power budget " << io::format_number( power_budget ) << " W\n";
      print( throttled );
      std::cout << "compute_ratio\t" << io::format_fixed( throttled.compute_s / full.compute_s, 3 ) << '\n'
                << "total_ratio\t" << io::format_fixed( throttled.total_s / full.total_s, 3 ) << '\n';
    }
    if ( !curve_path.empty() )
    {
      auto flat = perf_params::balanced();
      adjust( flat, measured );
      auto const counts = default_array_counts( flat.crossbars );
      auto const curve = latency_curve( flat, counts );
      auto emit = [&]( std::ostream& out ) {
        out << "arrays\tpim_seconds\tcpu_seconds\n";
        for ( auto const& pt : curve )
          out << io::format_number( pt.arrays ) << '\t' << io::format_fixed( pt.pim_s, 3 ) << '\t'
              << io::format_fixed( pt.cpu_s, 3 ) << '\n';
      };
      if ( curve_path == "-" )
        emit( std::cout );
      else
      {
        auto out = open_out( curve_path );
        emit( out );
      }
      std::cout << "# crossover_arrays\t" << crossover_arrays( flat ) << '\n';
    }
  }
};

/* ----------------------------------------------------------------- synth */

struct synth_cmd
{
  io::synth_options opt;
  std::string out_dir = ".";

  void add( CLI::App& root )
  {
    auto* app = root.add_subcommand( "synth", "seeded synthetic genome, reads and candidates" );
    app->add_option( "--genome-len", opt.genome_length, "genome bases" )->capture_default_str();
    app->add_option( "--reads", opt.reads, "reads, each listed at its true position" )->capture_default_str();
    app->add_option( "--edits", opt.edits, "edit budget per read (an indel costs two)" )->capture_default_str();
    app->add_option( "--decoys", opt.decoys, "extra random locations per read" )->capture_default_str();
    app->add_option( "--read-length", opt.read_length, "bases per read" )->capture_default_str();
    app->add_option( "--seed", opt.seed, "random seed" )->capture_default_str();
    app->add_option( "--out-dir", out_dir, "writes genome.fa, candidates.tsv and truth.tsv here" )->capture_default_str();
    app->callback( [this] { run(); } );
  }

  void run()
  {
    auto const corpus = io::synthesize( opt );
    std::filesystem::create_directories( out_dir );
    auto const dir = std::filesystem::path( out_dir );
    {
      auto out = open_out( ( dir / "genome.fa" ).string() );
      io::write_fasta( out, "synthetic seed=" + std::to_string( opt.seed ), corpus.genome );
    }
    auto cand = open_out( ( dir / "candidates.tsv" ).string() );
    auto truth = open_out( ( dir / "truth.tsv" ).string() );
    cand << "# read_id\tread\tposition\n";
    truth << "read_id\tposition\ttrue_location\tedits\n";
    for ( auto const& c : corpus.candidates )
    {
      io::write_candidate( cand, c.read_id, c.read, c.position );
      truth << c.read_id << '\t' << c.position << '\t' << ( c.true_location ? 1 : 0 ) << '\t' << c.edits << '\n';
    }
    std::cout << "wrote " << corpus.candidates.size() << " candidates over " << corpus.genome.size() << " bases to "
              << out_dir << '\n';
  }
};

/* ----------------------------------------------------------------- gates */

struct gates_cmd
{
  uint64_t seed = 1u;
  std::size_t trials = 1000u;

  void add( CLI::App& root )
  {
    auto* app = root.add_subcommand( "gates", "truth-table and cycle-cost self-test of the MAGIC operations" );
    app->add_option( "--seed", seed, "random seed for the wide operands" )->capture_default_str();
    app->add_option( "--trials", trials, "random cases for 8-bit ops and popcount" )->capture_default_str();
    app->callback( [this] { run(); } );
  }

  void run()
  {
    bool ok = true;
    std::cout << "op\tcases\tfailures\tcycles\texpected\tresult\n";
    for ( auto const& g : magic::run_gate_checks( seed, trials ) )
    {
      std::cout << g.name << '\t' << g.cases << '\t' << g.failures << '\t' << g.measured_cycles << '\t'
                << ( g.exact ? "" : "<=" ) << g.expected_cycles << '\t' << ( g.passed() ? "ok" : "FAIL" ) << '\n';
      ok = ok && g.passed();
    }
    if ( !ok )
      throw CLI::RuntimeError( 1 );
  }
};

} // namespace

int main( int argc, char** argv )
{
  CLI::App app( "Simulator of a base-count DNA pre-alignment filter on MAGIC NOR crossbars" );
  app.set_config( "--config", "", "key=value configuration file" );
  app.require_subcommand( 1 );

  filter_cmd filter;
  validate_cmd validate;
  model_cmd model;
  synth_cmd synth;
  gates_cmd gates;
  filter.add( app );
  validate.add( app );
  model.add( app );
  synth.add( app );
  gates.add( app );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    return app.exit( e );
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
