/*!
  \file micro_op.hpp
  \brief The in-memory instruction set and programs built from it
*/

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crossbar.hpp"

namespace pimfilter::magic
{

/*! \brief Sets every listed cell to logical '1' in one initialization cycle. */
struct init_op
{
  std::vector<cell_region> regions;
};

/*! \brief MAGIC NOR inside rows: for every row r in `rows`,
 * cell(r, output_col) <- NOR(cell(r, c) for c in input_cols). One compute cycle.
 */
struct nor_row_op
{
  std::vector<uint32_t> input_cols;
  uint32_t output_col{};
  index_set rows;
};

/*! \brief MAGIC NOR inside columns; the transpose of `nor_row_op`. One compute cycle. */
struct nor_col_op
{
  std::vector<uint32_t> input_rows;
  uint32_t output_row{};
  index_set cols;
};

/*! \brief Host-driven write of explicit bit values at a caller-declared cycle cost. */
struct write_external_op
{
  std::vector<cell> cells;
  std::vector<bool> bits;
  uint64_t cycle_cost{};
};

/*! \brief Reads one cell out of the array. One compute cycle. */
struct read_cell_op
{
  cell target;
};

using micro_op = std::variant<init_op, nor_row_op, nor_col_op, write_external_op, read_cell_op>;

/*! \brief Compute cycles an op would add when executed. */
inline uint64_t compute_cost( micro_op const& op )
{
  if ( auto const* w = std::get_if<write_external_op>( &op ) )
    return w->cycle_cost;
  return std::holds_alternative<init_op>( op ) ? 0u : 1u;
}

inline uint64_t init_cost( micro_op const& op )
{
  return std::holds_alternative<init_op>( op ) ? 1u : 0u;
}

inline std::string describe( micro_op const& op )
{
  struct visitor
  {
    std::string operator()( init_op const& o ) const
    {
      std::string s = "init";
      for ( auto const& r : o.regions )
        s += " rows=" + r.rows.to_string() + "/cols=" + r.cols.to_string();
      return s;
    }
    std::string operator()( nor_row_op const& o ) const
    {
      std::string s = "nor_row in=[";
      for ( std::size_t i = 0; i < o.input_cols.size(); ++i )
        s += ( i ? "," : "" ) + std::to_string( o.input_cols[i] );
      return s + "] out=" + std::to_string( o.output_col ) + " rows=" + o.rows.to_string();
    }
    std::string operator()( nor_col_op const& o ) const
    {
      std::string s = "nor_col in=[";
      for ( std::size_t i = 0; i < o.input_rows.size(); ++i )
        s += ( i ? "," : "" ) + std::to_string( o.input_rows[i] );
      return s + "] out=" + std::to_string( o.output_row ) + " cols=" + o.cols.to_string();
    }
    std::string operator()( write_external_op const& o ) const
    {
      return "write cells=" + std::to_string( o.cells.size() ) + " cost=" + std::to_string( o.cycle_cost );
    }
    std::string operator()( read_cell_op const& o ) const
    {
      return "read (" + std::to_string( o.target.row ) + "," + std::to_string( o.target.col ) + ")";
    }
  };
  return std::visit( visitor{}, op );
}

/*! \brief Labels a contiguous range [first, last) of a program's ops. */
struct step_annotation
{
  int step{};
  std::size_t first{};
  std::size_t last{};
};

/*! \brief An ordered list of micro-ops with optional step labels.
 *
 * When annotations are present they must partition the op list into
 * contiguous ranges; several ranges may carry the same step label.
 */
class micro_program
{
public:
  std::vector<micro_op> const& ops() const { return ops_; }
  std::vector<step_annotation> const& annotations() const { return annotations_; }

  std::size_t size() const { return ops_.size(); }
  bool empty() const { return ops_.empty(); }

  micro_program& push( micro_op op )
  {
    ops_.push_back( std::move( op ) );
    return *this;
  }

  micro_program& init( std::vector<cell_region> regions ) { return push( init_op{ std::move( regions ) } ); }

  micro_program& nor_row( std::vector<uint32_t> inputs, uint32_t output, index_set rows )
  {
    return push( nor_row_op{ std::move( inputs ), output, std::move( rows ) } );
  }

  micro_program& nor_col( std::vector<uint32_t> inputs, uint32_t output, index_set cols )
  {
    return push( nor_col_op{ std::move( inputs ), output, std::move( cols ) } );
  }

  micro_program& read( cell c ) { return push( read_cell_op{ c } ); }

  /*! \brief Appends another program; its annotations are shifted, unannotated ops stay unlabeled. */
  micro_program& append( micro_program const& other )
  {
    auto const base = ops_.size();
    ops_.insert( ops_.end(), other.ops_.begin(), other.ops_.end() );
    for ( auto a : other.annotations_ )
      annotations_.push_back( { a.step, a.first + base, a.last + base } );
    return *this;
  }

  /*! \brief Appends another program and labels all of its ops with `step`. */
  micro_program& append_step( int step, micro_program const& other )
  {
    auto const first = ops_.size();
    ops_.insert( ops_.end(), other.ops_.begin(), other.ops_.end() );
    annotate( step, first, ops_.size() );
    return *this;
  }

  void annotate( int step, std::size_t first, std::size_t last )
  {
    if ( first > last || last > ops_.size() )
      throw std::out_of_range( "annotation range outside program" );
    if ( first == last )
      return;
    if ( !annotations_.empty() && annotations_.back().step == step && annotations_.back().last == first )
      annotations_.back().last = last;
    else
      annotations_.push_back( { step, first, last } );
  }

  /*! \brief True when there are no annotations or they exactly tile [0, size()). */
  bool annotations_partition() const
  {
    if ( annotations_.empty() )
      return true;
    std::size_t next = 0;
    for ( auto const& a : annotations_ )
    {
      if ( a.first != next || a.last <= a.first )
        return false;
      next = a.last;
    }
    return next == ops_.size();
  }

  uint64_t compute_cost() const
  {
    uint64_t n = 0;
    for ( auto const& op : ops_ )
      n += magic::compute_cost( op );
    return n;
  }

  uint64_t init_cost() const
  {
    uint64_t n = 0;
    for ( auto const& op : ops_ )
      n += magic::init_cost( op );
    return n;
  }

private:
  std::vector<micro_op> ops_;
  std::vector<step_annotation> annotations_;
};

} // namespace pimfilter::magic
