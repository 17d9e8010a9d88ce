#pragma once

#include "dyta/dataset/prepared.hpp"
#include "support/ml1m_fixture.hpp"
#include "support/temp_dir.hpp"

namespace dyta::testing {

/// Synthetic ML-1M-format dataset, written to disk and loaded through the real loader.
inline data::PreparedDataset fixture_dataset(const FixtureSpec& spec = {})
{
    TempDir dir;
    write_ml1m_fixture(dir.path(), spec);
    return data::prepare_dataset(data::load_ml1m(dir.path()));
}

} // namespace dyta::testing
