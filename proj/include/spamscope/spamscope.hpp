#pragma once

#include "spamscope/classifier.hpp"
#include "spamscope/error.hpp"
#include "spamscope/features.hpp"
#include "spamscope/ingest.hpp"
#include "spamscope/model.hpp"
#include "spamscope/report.hpp"
#include "spamscope/synth.hpp"
#include "spamscope/text.hpp"
#include "spamscope/timestamp.hpp"
#include "spamscope/pipeline.hpp"
