#include <pimfilter/io/candidates.hpp>
#include <pimfilter/io/fasta.hpp>
#include <pimfilter/io/results.hpp>
#include <pimfilter/io/synth.hpp>
#include <pimfilter/io/text.hpp>
#include <pimfilter/oracle.hpp>

#include <gtest/gtest.h>

#include <locale>
#include <sstream>

using namespace pimfilter;

TEST( fasta, single_record )
{
  std::istringstream in( ">x\nACGT\n" );
  auto const g = io::parse_fasta( in );
  EXPECT_EQ( g.sequence, "ACGT" );
  ASSERT_EQ( g.records.size(), 1u );
  EXPECT_EQ( g.records[0].name, "x" );
  EXPECT_EQ( g.records[0].length, 4u );
}

TEST( fasta, case_folding_and_crlf )
{
  std::istringstream in( ">x\r\nacgt\r\nAc\r\n" );
  EXPECT_EQ( io::parse_fasta( in ).sequence, "ACGTAC" );
}

TEST( fasta, multi_record_boundaries )
{
  std::istringstream in( ">a desc\nAC\nGT\n\n>b\nTTT\n" );
  auto const g = io::parse_fasta( in );
  EXPECT_EQ( g.sequence, "ACGTTTT" );
  ASSERT_EQ( g.records.size(), 2u );
  EXPECT_EQ( g.records[0].name, "a desc" );
  EXPECT_EQ( g.records[0].start, 0u );
  EXPECT_EQ( g.records[0].length, 4u );
  EXPECT_EQ( g.records[1].start, 4u );
  EXPECT_EQ( g.records[1].length, 3u );
}

TEST( fasta, rejects_non_acgt_with_position )
{
  std::istringstream in( ">x\nACNT\n" );
  try
  {
    io::parse_fasta( in );
    FAIL() << "expected parse_error";
  }
  catch ( io::parse_error const& e )
  {
    EXPECT_EQ( e.line(), 2u );
    EXPECT_EQ( e.column(), 3u );
    EXPECT_NE( std::string( e.what() ).find( "'N'" ), std::string::npos );
  }
}

TEST( fasta, rejects_empty_input_and_headerless_data )
{
  std::istringstream empty( "" );
  EXPECT_THROW( io::parse_fasta( empty ), io::parse_error );
  std::istringstream headerless( "ACGT\n" );
  EXPECT_THROW( io::parse_fasta( headerless ), io::parse_error );
}

TEST( fasta, write_then_parse_round_trip )
{
  io::synth_rng rng( 3 );
  auto const seq = io::random_genome( 1'001, rng );
  std::ostringstream out;
  io::write_fasta( out, "chr", seq, 60 );
  std::istringstream in( out.str() );
  EXPECT_EQ( io::parse_fasta( in ).sequence, seq );
}

TEST( candidates, parse_records_and_comments )
{
  std::string const read( 100, 'A' );
  std::istringstream in( "# comment\n\nr1\t" + read + "\t0\nr2\t" + std::string( 50, 'c' ) + std::string( 50, 'G' ) + "\t4294967295\n" );
  auto const c = io::parse_candidates( in );
  ASSERT_EQ( c.size(), 2u );
  EXPECT_EQ( c[0].read_id, "r1" );
  EXPECT_EQ( c[0].position, 0u );
  EXPECT_EQ( c[0].hist[base::A], 100u );
  EXPECT_EQ( c[1].hist[base::C], 50u );
  EXPECT_EQ( c[1].hist[base::G], 50u );
  EXPECT_EQ( c[1].position, 4294967295u );
}

TEST( candidates, errors )
{
  auto fails = []( std::string const& text, io::candidate_options o = {} ) {
    std::istringstream in( text );
    try
    {
      io::parse_candidates( in, o );
    }
    catch ( io::parse_error const& e )
    {
      return e.line();
    }
    return std::size_t{ 0 };
  };
  std::string const read( 100, 'T' );
  EXPECT_EQ( fails( "r1\tAAAA\t0\n" ), 1u );
  EXPECT_EQ( fails( "# c\nr1\t" + read + "\t4294967296\n" ), 2u );
  EXPECT_EQ( fails( "r1\t" + read + "\t-1\n" ), 1u );
  EXPECT_EQ( fails( "r1\t" + read + "\n" ), 1u );
  EXPECT_EQ( fails( "r1\t" + std::string( 99, 'A' ) + "N\t5\n" ), 1u );
  EXPECT_EQ( fails( "r1\t" + read + "\t5\textra\n" ), 1u );
}

TEST( candidates, raw_histograms )
{
  std::istringstream in( "r1\t10,20,30,40\t7\n" );
  auto const c = io::parse_candidates( in, { 100, true } );
  ASSERT_EQ( c.size(), 1u );
  EXPECT_EQ( c[0].hist[base::A], 10u );
  EXPECT_EQ( c[0].hist[base::T], 20u );
  EXPECT_EQ( c[0].hist[base::G], 30u );
  EXPECT_EQ( c[0].hist[base::C], 40u );

  std::istringstream too_many( "r1\t100,1,0,0\t7\n" );
  EXPECT_THROW( io::parse_candidates( too_many, { 100, true } ), io::parse_error );
  std::istringstream short_list( "r1\t1,2,3\t7\n" );
  EXPECT_THROW( io::parse_candidates( short_list, { 100, true } ), io::parse_error );
}

TEST( results, empty_run_has_header_and_zero_summary )
{
  std::ostringstream out;
  io::emit_results( out, {}, filter_run{} );
  auto const s = out.str();
  EXPECT_EQ( s.rfind( "read_id\tposition\tdecision\n", 0 ), 0u );
  EXPECT_NE( s.find( "# total\t0\n" ), std::string::npos );
  EXPECT_NE( s.find( "# discard_rate\t0.000000\n" ), std::string::npos );
}

TEST( results, one_line_per_decision_and_round_trip )
{
  std::vector<candidate> cands{ { "r1", {}, 6400 }, { "r2", {}, 17 }, { "r3", {}, 99 } };
  filter_run run;
  run.decisions = { { 0, 1, verdict::discard, 1919, 67 }, { 1, 0, verdict::keep, 1919, 67 }, { 2, 0, verdict::passthrough, 0, 0 } };
  run.stats.total = 3;
  run.stats.processed = 2;
  run.stats.discarded = 1;
  run.stats.kept = 1;
  run.stats.passthrough = 1;
  run.stats.bytes_transferred = 26;
  std::ostringstream out;
  io::emit_results( out, cands, run );
  auto const s = out.str();
  EXPECT_NE( s.find( "\nr1\t6400\tdiscard\n" ), std::string::npos );
  EXPECT_NE( s.find( "# discard_rate\t0.500000\n" ), std::string::npos );
  EXPECT_NE( s.find( "# bytes_transferred\t26\n" ), std::string::npos );

  std::istringstream in( s );
  auto const lines = io::parse_results( in );
  ASSERT_EQ( lines.size(), 3u );
  EXPECT_EQ( lines[0].read_id, "r1" );
  EXPECT_EQ( lines[0].position, 6400u );
  EXPECT_EQ( lines[0].outcome, verdict::discard );
  EXPECT_EQ( lines[2].outcome, verdict::passthrough );
}

TEST( text, formatting_ignores_the_global_locale )
{
  auto const old = std::locale::global( std::locale::classic() );
  EXPECT_EQ( io::format_fixed( 73.6, 3 ), "73.600" );
  EXPECT_EQ( io::format_fixed( 1234567.5, 1 ), "1234567.5" );
  EXPECT_EQ( io::format_number( 0.25 ), "0.25" );
  std::locale::global( old );
}

TEST( synth, seeded_and_reproducible )
{
  io::synth_options o;
  o.genome_length = 5'000;
  o.reads = 20;
  o.edits = 3;
  o.decoys = 2;
  o.seed = 42;
  auto const a = io::synthesize( o ), b = io::synthesize( o );
  EXPECT_EQ( a.genome, b.genome );
  ASSERT_EQ( a.candidates.size(), 60u );
  for ( std::size_t i = 0; i < a.candidates.size(); ++i )
  {
    EXPECT_EQ( a.candidates[i].read, b.candidates[i].read );
    EXPECT_EQ( a.candidates[i].position, b.candidates[i].position );
  }
  o.seed = 43;
  EXPECT_NE( io::synthesize( o ).genome, a.genome );
}

TEST( synth, true_locations_are_within_the_edit_budget )
{
  io::synth_options o;
  o.genome_length = 20'000;
  o.reads = 200;
  o.edits = 5;
  auto const c = io::synthesize( o );
  for ( auto const& x : c.candidates )
  {
    ASSERT_EQ( x.read.size(), 100u );
    if ( x.true_location )
    {
      EXPECT_LE( x.edits, 5u );
      EXPECT_LE( oracle::edit_distance( x.read, std::string_view( c.genome ).substr( x.position, 100 ) ), x.edits );
    }
  }
}

TEST( synth, candidates_round_trip_through_tsv )
{
  io::synth_options o;
  o.genome_length = 3'000;
  o.reads = 10;
  o.decoys = 1;
  auto const c = io::synthesize( o );
  std::ostringstream out;
  for ( auto const& x : c.candidates )
    io::write_candidate( out, x.read_id, x.read, x.position );
  std::istringstream in( out.str() );
  auto const parsed = io::parse_candidates( in );
  ASSERT_EQ( parsed.size(), c.candidates.size() );
  for ( std::size_t i = 0; i < parsed.size(); ++i )
  {
    EXPECT_EQ( parsed[i].read_id, c.candidates[i].read_id );
    EXPECT_EQ( parsed[i].position, c.candidates[i].position );
    EXPECT_EQ( parsed[i].hist.counts(), oracle::histogram( c.candidates[i].read ) );
  }
}
