/*!
  \file execute.hpp
  \brief Validation and cycle-counting execution of micro-programs
*/

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossbar.hpp"
#include "micro_op.hpp"

namespace pimfilter::magic
{

enum class exec_mode
{
  /*! NOR outputs must hold '1' beforehand and inputs must be defined. */
  strict,
  /*! output <- old_output AND NOR(inputs), the conditional-switching behaviour. */
  permissive
};

enum class violation_kind
{
  out_of_bounds,
  output_among_inputs,
  empty_operand,
  size_mismatch,
  output_not_initialized,
  undefined_input
};

inline char const* to_string( violation_kind k )
{
  switch ( k )
  {
  case violation_kind::out_of_bounds: return "out of bounds";
  case violation_kind::output_among_inputs: return "output among inputs";
  case violation_kind::empty_operand: return "empty operand";
  case violation_kind::size_mismatch: return "size mismatch";
  case violation_kind::output_not_initialized: return "output not initialized";
  case violation_kind::undefined_input: return "undefined input";
  }
  return "unknown";
}

struct violation
{
  violation_kind kind;
  std::string message;
};

class execution_error : public std::runtime_error
{
public:
  execution_error( std::size_t op_index, std::vector<violation> violations )
      : std::runtime_error( format( op_index, violations ) ), op_index_( op_index ), violations_( std::move( violations ) )
  {
  }

  std::size_t op_index() const { return op_index_; }
  std::vector<violation> const& violations() const { return violations_; }

private:
  static std::string format( std::size_t op_index, std::vector<violation> const& vs )
  {
    std::string s = "op " + std::to_string( op_index ) + ":";
    for ( auto const& v : vs )
      s += std::string( " [" ) + to_string( v.kind ) + "] " + v.message + ";";
    return s;
  }

  std::size_t op_index_;
  std::vector<violation> violations_;
};

namespace detail
{

inline void check_rows( index_set const& rows, crossbar const& xb, char const* what, std::vector<violation>& out )
{
  if ( rows.empty() )
    out.push_back( { violation_kind::empty_operand, std::string( what ) + " is empty" } );
  else if ( rows.bound() > xb.rows() )
    out.push_back( { violation_kind::out_of_bounds, std::string( what ) + " row " + std::to_string( rows.bound() - 1 ) +
                                                        " out of bounds" } );
}

inline void check_cols( index_set const& cols, crossbar const& xb, char const* what, std::vector<violation>& out )
{
  if ( cols.empty() )
    out.push_back( { violation_kind::empty_operand, std::string( what ) + " is empty" } );
  else if ( cols.bound() > xb.cols() )
    out.push_back( { violation_kind::out_of_bounds, std::string( what ) + " column " + std::to_string( cols.bound() - 1 ) +
                                                        " out of bounds" } );
}

inline void check_cell( cell c, crossbar const& xb, std::vector<violation>& out )
{
  if ( c.row >= xb.rows() )
    out.push_back( { violation_kind::out_of_bounds, "row " + std::to_string( c.row ) + " out of bounds" } );
  if ( c.col >= xb.cols() )
    out.push_back( { violation_kind::out_of_bounds, "column " + std::to_string( c.col ) + " out of bounds" } );
}

struct validator
{
  crossbar const& xb;
  exec_mode mode;
  std::vector<violation>& out;

  void operator()( init_op const& op ) const
  {
    if ( op.regions.empty() )
      out.push_back( { violation_kind::empty_operand, "init cell set is empty" } );
    for ( auto const& r : op.regions )
    {
      check_rows( r.rows, xb, "init rows", out );
      check_cols( r.cols, xb, "init cols", out );
    }
  }

  void operator()( nor_row_op const& op ) const
  {
    check_rows( op.rows, xb, "row set", out );
    if ( op.input_cols.empty() )
      out.push_back( { violation_kind::empty_operand, "NOR has no inputs" } );
    bool bounds_ok = op.output_col < xb.cols() && !op.rows.empty() && op.rows.bound() <= xb.rows();
    if ( op.output_col >= xb.cols() )
      out.push_back( { violation_kind::out_of_bounds, "output column " + std::to_string( op.output_col ) + " out of bounds" } );
    for ( auto c : op.input_cols )
    {
      if ( c >= xb.cols() )
      {
        out.push_back( { violation_kind::out_of_bounds, "input column " + std::to_string( c ) + " out of bounds" } );
        bounds_ok = false;
      }
      if ( c == op.output_col )
        out.push_back( { violation_kind::output_among_inputs, "output column " + std::to_string( c ) + " is also an input" } );
    }
    if ( !bounds_ok || mode != exec_mode::strict )
      return;
    for ( uint32_t w = 0; w < xb.words_per_col(); ++w )
    {
      auto const m = op.rows.word( w );
      if ( ( xb.word( op.output_col, w ) & m ) != m )
      {
        out.push_back( { violation_kind::output_not_initialized,
                         "output column " + std::to_string( op.output_col ) + " not '1' in every active row" } );
        break;
      }
    }
    for ( auto c : op.input_cols )
      for ( uint32_t w = 0; w < xb.words_per_col(); ++w )
      {
        auto const m = op.rows.word( w );
        if ( ( xb.defined_word( c, w ) & m ) != m )
        {
          out.push_back( { violation_kind::undefined_input, "input column " + std::to_string( c ) + " read before initialization" } );
          break;
        }
      }
  }

  void operator()( nor_col_op const& op ) const
  {
    check_cols( op.cols, xb, "column set", out );
    if ( op.input_rows.empty() )
      out.push_back( { violation_kind::empty_operand, "NOR has no inputs" } );
    bool bounds_ok = op.output_row < xb.rows() && !op.cols.empty() && op.cols.bound() <= xb.cols();
    if ( op.output_row >= xb.rows() )
      out.push_back( { violation_kind::out_of_bounds, "output row " + std::to_string( op.output_row ) + " out of bounds" } );
    for ( auto r : op.input_rows )
    {
      if ( r >= xb.rows() )
      {
        out.push_back( { violation_kind::out_of_bounds, "input row " + std::to_string( r ) + " out of bounds" } );
        bounds_ok = false;
      }
      if ( r == op.output_row )
        out.push_back( { violation_kind::output_among_inputs, "output row " + std::to_string( r ) + " is also an input" } );
    }
    if ( !bounds_ok || mode != exec_mode::strict )
      return;
    bool uninit = false, undefined = false;
    op.cols.for_each( [&]( uint32_t c ) {
      uninit = uninit || !xb.get( op.output_row, c );
      for ( auto r : op.input_rows )
        undefined = undefined || !xb.is_defined( r, c );
    } );
    if ( uninit )
      out.push_back( { violation_kind::output_not_initialized,
                       "output row " + std::to_string( op.output_row ) + " not '1' in every active column" } );
    if ( undefined )
      out.push_back( { violation_kind::undefined_input, "input rows read before initialization" } );
  }

  void operator()( write_external_op const& op ) const
  {
    if ( op.cells.empty() )
      out.push_back( { violation_kind::empty_operand, "write has no cells" } );
    if ( op.cells.size() != op.bits.size() )
      out.push_back( { violation_kind::size_mismatch, "write lists " + std::to_string( op.cells.size() ) + " cells but " +
                                                          std::to_string( op.bits.size() ) + " bits" } );
    for ( auto c : op.cells )
      check_cell( c, xb, out );
  }

  void operator()( read_cell_op const& op ) const
  {
    check_cell( op.target, xb, out );
    if ( mode == exec_mode::strict && xb.in_bounds( op.target ) && !xb.is_defined( op.target.row, op.target.col ) )
      out.push_back( { violation_kind::undefined_input, "read of a cell that was never written" } );
  }
};

} // namespace detail

/*! \brief Lists every constraint `op` violates against the current state; empty means executable. */
inline std::vector<violation> validate( micro_op const& op, crossbar const& xb, exec_mode mode = exec_mode::strict )
{
  std::vector<violation> out;
  std::visit( detail::validator{ xb, mode, out }, op );
  return out;
}

struct step_cycles
{
  uint64_t compute{};
  uint64_t init{};
};

struct cycle_report
{
  uint64_t compute{};
  uint64_t init{};
  /*! keyed by step label; unannotated ops are accounted under step 0 */
  std::map<int, step_cycles> per_step;

  uint64_t total() const { return compute + init; }
};

struct execution_options
{
  exec_mode mode = exec_mode::strict;
  /*! when set, one trace line per op is written here */
  std::ostream* trace = nullptr;
};

struct execution_result
{
  std::vector<bool> read_bits;
  cycle_report cycles;
};

namespace detail
{

struct applier
{
  crossbar& xb;
  exec_mode mode;
  std::vector<bool>& reads;

  void operator()( init_op const& op ) const
  {
    for ( auto const& r : op.regions )
      r.cols.for_each( [&]( uint32_t c ) {
        for ( uint32_t w = 0; w < xb.words_per_col(); ++w )
        {
          auto const m = r.rows.word( w );
          xb.word( c, w ) |= m;
          xb.defined_word( c, w ) |= m;
        }
      } );
    xb.add_init_cycles( 1u );
  }

  void operator()( nor_row_op const& op ) const
  {
    for ( uint32_t w = 0; w < xb.words_per_col(); ++w )
    {
      auto const m = op.rows.word( w );
      if ( m == 0u )
        continue;
      uint64_t acc = 0u;
      for ( auto c : op.input_cols )
        acc |= xb.word( c, w );
      auto& out = xb.word( op.output_col, w );
      auto const value = mode == exec_mode::strict ? ~acc : ( out & ~acc );
      out = ( out & ~m ) | ( value & m );
      xb.defined_word( op.output_col, w ) |= m;
    }
    xb.add_compute_cycles( 1u );
  }

  void operator()( nor_col_op const& op ) const
  {
    auto const ow = op.output_row / 64u;
    auto const ob = uint64_t{ 1 } << ( op.output_row % 64u );
    op.cols.for_each( [&]( uint32_t c ) {
      bool any = false;
      for ( auto r : op.input_rows )
        any = any || ( ( xb.word( c, r / 64u ) >> ( r % 64u ) ) & 1u );
      auto& out = xb.word( c, ow );
      bool const old = out & ob;
      bool const value = mode == exec_mode::strict ? !any : ( old && !any );
      out = value ? ( out | ob ) : ( out & ~ob );
      xb.defined_word( c, ow ) |= ob;
    } );
    xb.add_compute_cycles( 1u );
  }

  void operator()( write_external_op const& op ) const
  {
    for ( std::size_t i = 0; i < op.cells.size(); ++i )
    {
      auto const c = op.cells[i];
      auto const b = uint64_t{ 1 } << ( c.row % 64u );
      auto& out = xb.word( c.col, c.row / 64u );
      out = op.bits[i] ? ( out | b ) : ( out & ~b );
      xb.defined_word( c.col, c.row / 64u ) |= b;
    }
    xb.add_compute_cycles( op.cycle_cost );
  }

  void operator()( read_cell_op const& op ) const
  {
    reads.push_back( xb.get( op.target ) );
    xb.add_compute_cycles( 1u );
  }
};

inline bool is_fatal( violation const& v, exec_mode mode )
{
  if ( mode == exec_mode::strict )
    return true;
  return v.kind != violation_kind::output_not_initialized && v.kind != violation_kind::undefined_input;
}

} // namespace detail

/*! \brief Runs `program` on `xb`, mutating it in place.
 *
 * Each op is validated against the evolving state before it is applied; on a
 * fatal violation an `execution_error` is thrown and the offending op is not
 * applied. Cycle counters of `xb` accumulate across calls.
 */
inline execution_result execute( micro_program const& program, crossbar& xb, execution_options const& options = {} )
{
  execution_result result;
  auto const& ops = program.ops();

  std::vector<int> step_of( ops.size(), 0 );
  for ( auto const& a : program.annotations() )
    for ( auto i = a.first; i < a.last && i < ops.size(); ++i )
      step_of[i] = a.step;

  for ( std::size_t i = 0; i < ops.size(); ++i )
  {
    auto const& op = ops[i];
    auto violations = validate( op, xb, options.mode );
    std::erase_if( violations, [&]( auto const& v ) { return !detail::is_fatal( v, options.mode ); } );
    if ( !violations.empty() )
      throw execution_error( i, std::move( violations ) );

    if ( options.trace )
    {
      bool const is_init = std::holds_alternative<init_op>( op );
      *options.trace << ( is_init ? "init " : "compute " ) << ( is_init ? xb.init_cycles() : xb.compute_cycles() ) << ' '
                     << describe( op ) << '\n';
    }

    auto const before_compute = xb.compute_cycles();
    auto const before_init = xb.init_cycles();
    std::visit( detail::applier{ xb, options.mode, result.read_bits }, op );
    auto const dc = xb.compute_cycles() - before_compute;
    auto const di = xb.init_cycles() - before_init;

    result.cycles.compute += dc;
    result.cycles.init += di;
    auto& s = result.cycles.per_step[step_of[i]];
    s.compute += dc;
    s.init += di;
  }
  return result;
}

} // namespace pimfilter::magic
