#pragma once

#include "citecascade/citation_source.hpp"
#include "citecascade/clustering.hpp"
#include "citecascade/cocitation.hpp"
#include "citecascade/error.hpp"
#include "citecascade/expansion.hpp"
#include "citecascade/labeling.hpp"
#include "citecascade/network_io.hpp"
#include "citecascade/overlay.hpp"
#include "citecascade/record_store.hpp"
#include "citecascade/remote_source.hpp"
#include "citecascade/render.hpp"
