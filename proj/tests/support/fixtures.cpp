#include "support/fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <optional>

#include "spanprobe/rng.hpp"

namespace fixtures {

using spanprobe::ExampleRecord;
using spanprobe::Label;
using spanprobe::Language;
using spanprobe::Setting;
using spanprobe::TableFormat;

namespace {

ExampleRecord make(std::string id, Language lang, std::string mwe, std::string previous,
                   std::string target, std::string next, std::optional<Label> label,
                   Setting tag) {
  ExampleRecord record;
  record.id = std::move(id);
  record.language = lang;
  record.mwe = std::move(mwe);
  record.previous = std::move(previous);
  record.target = std::move(target);
  record.next = std::move(next);
  record.label = label;
  record.setting_tag = tag;
  return record;
}

constexpr Label kIdiom = Label::IDIOMATIC;
constexpr Label kLiteral = Label::NON_IDIOMATIC;

}  // namespace

Corpus small_corpus() {
  Corpus corpus;
  const Setting zero = Setting::ZERO_SHOT;
  const Setting one = Setting::ONE_SHOT;

  // 18 zero-shot training rows: six MWEs never seen at evaluation time.
  corpus.train = {
      make("tr01", Language::EN, "spill the beans", "We met for dinner.",
           "Someone had to spill the beans about the party.", "Everyone laughed.", kIdiom, zero),
      make("tr02", Language::EN, "spill the beans", "",
           "He said, \"spill the beans\", and waited.", "", kIdiom, zero),
      make("tr03", Language::EN, "spill the beans", "The jar tipped over.",
           "Did you really Spill The Beans across the counter?", "We swept them up.", kLiteral,
           zero),
      make("tr04", Language::EN, "under the weather", "She called in the morning.",
           "I felt under the weather and stayed home.", "", kIdiom, zero),
      make("tr05", Language::EN, "under the weather", "",
           "The picnic table sat under the weather vane.", "It creaked in the wind.", kLiteral,
           zero),
      make("tr06", Language::EN, "under the weather", "",
           "Nothing in this sentence matches that expression at all.", "", kIdiom, zero),
      make("tr07", Language::PT, "pão duro", "Fomos ao mercado.",
           "O meu tio é um pão duro incorrigível.", "Nunca paga nada.", kIdiom, zero),
      make("tr08", Language::PT, "pão duro", "",
           "Sobrou um Pão Duro de ontem na cesta.", "", kLiteral, zero),
      make("tr09", Language::PT, "pão duro", "A padaria fechou cedo.",
           "Ele guardou o pão duro para as aves.", "", kLiteral, zero),
      make("tr10", Language::PT, "mala sem alça", "",
           "Aquele vizinho é uma mala sem alça.", "Ninguém o aguenta.", kIdiom, zero),
      make("tr11", Language::PT, "mala sem alça", "Chegamos ao aeroporto.",
           "Carreguei a mala sem alça pelo saguão.", "", kLiteral, zero),
      make("tr12", Language::PT, "mala sem alça", "",
           "Ser uma MALA SEM ALÇA cansa qualquer amizade.", "", kIdiom, zero),
      make("tr13", Language::GL, "lúa chea", "Saímos á noite.",
           "A lúa chea iluminaba o camiño enteiro.", "", kLiteral, zero),
      make("tr14", Language::GL, "lúa chea", "",
           "Con Lúa Chea non se pesca ben, din os vellos.", "É unha crenza antiga.", kIdiom, zero),
      make("tr15", Language::GL, "lúa chea", "O ceo estaba claro.",
           "Agardamos pola lúa chea para a festa.", "", kLiteral, zero),
      make("tr16", Language::GL, "auga fervendo", "",
           "Botou as patacas na auga fervendo.", "Coceron axiña.", kLiteral, zero),
      make("tr17", Language::GL, "auga fervendo", "Discutiron toda a tarde.",
           "Andaban coma auga fervendo un co outro.", "", kIdiom, zero),
      make("tr18", Language::GL, "auga fervendo", "",
           "A auga fervendo botaba vapor pola cociña.", "", kLiteral, zero),

      // 12 one-shot training rows: both labels for every evaluation MWE.
      make("tr19", Language::EN, "big fish", "",
           "She is a big fish in local politics.", "", kIdiom, one),
      make("tr20", Language::EN, "big fish", "The lake was calm.",
           "He caught a big fish near the dock.", "", kLiteral, one),
      make("tr21", Language::EN, "cold feet", "",
           "The groom got cold feet before the ceremony.", "", kIdiom, one),
      make("tr22", Language::EN, "cold feet", "Winter arrived early.",
           "Wool socks help with cold feet at night.", "", kLiteral, one),
      make("tr23", Language::PT, "água mole", "",
           "Água mole em pedra dura tanto bate até que fura.", "", kIdiom, one),
      make("tr24", Language::PT, "água mole", "O encanador veio ontem.",
           "A caixa despeja água mole sem pressão.", "", kLiteral, one),
      make("tr25", Language::PT, "fogo brando", "",
           "A negociação seguiu em fogo brando por meses.", "", kIdiom, one),
      make("tr26", Language::PT, "fogo brando", "Liguei o fogão.",
           "Cozinhe o molho em fogo brando por uma hora.", "", kLiteral, one),
      make("tr27", Language::GL, "pedra viva", "",
           "Aquela teimosía é pedra viva, non hai quen a mova.", "", kIdiom, one),
      make("tr28", Language::GL, "pedra viva", "Subimos ao monte.",
           "O muro está feito de pedra viva do lugar.", "", kLiteral, one),
      make("tr29", Language::GL, "vento forte", "",
           "Falaba con vento forte, todo fume e pouca faena.", "", kIdiom, one),
      make("tr30", Language::GL, "vento forte", "Pechamos as fiestras.",
           "Un vento forte tirou as tellas do alpendre.", "", kLiteral, one),
  };

  // Dev: the three one-shot MWEs EN/PT/GL, five rows each.
  corpus.dev = {
      make("dv01", Language::EN, "big fish", "", "A big fish like her ignores small clubs.", "",
           kIdiom, one),
      make("dv02", Language::EN, "big fish", "We sailed at dawn.",
           "The net held one big fish and two crabs.", "", kLiteral, one),
      make("dv03", Language::EN, "big fish", "", "Being the Big Fish of the office suits him.", "",
           kIdiom, one),
      make("dv04", Language::EN, "big fish", "", "Grandpa grilled the big fish with lemon.", "",
           kLiteral, one),
      make("dv05", Language::EN, "big fish", "The merger closed.",
           "Investors court a big fish such as that firm.", "", kIdiom, one),
      make("dv06", Language::PT, "água mole", "", "Insistir é água mole: um dia a porta cede.", "",
           kIdiom, one),
      make("dv07", Language::PT, "água mole", "", "O filtro devolve água mole e sem cloro.", "",
           kLiteral, one),
      make("dv08", Language::PT, "água mole", "A obra parou.",
           "Paciência de água mole vence o edital.", "", kIdiom, one),
      make("dv09", Language::PT, "água mole", "", "Lavei o carro com água mole da cisterna.", "",
           kLiteral, one),
      make("dv10", Language::PT, "água mole", "", "ÁGUA MOLE convence mais que grito alto.", "",
           kIdiom, one),
      make("dv11", Language::GL, "pedra viva", "", "O costume é pedra viva nesta aldea.", "",
           kIdiom, one),
      make("dv12", Language::GL, "pedra viva", "Repararon a igrexa.",
           "Talláronse os arcos en pedra viva.", "", kLiteral, one),
      make("dv13", Language::GL, "pedra viva", "", "A súa fe quedou pedra viva tras todo.", "",
           kIdiom, one),
      make("dv14", Language::GL, "pedra viva", "", "O canteiro escolle pedra viva sen vetas.", "",
           kLiteral, one),
      make("dv15", Language::GL, "pedra viva", "",
           "Completely unrelated words fill this line.", "", kIdiom, one),
  };

  // Test: the remaining three one-shot MWEs, five rows each.
  corpus.test = {
      make("ts01", Language::EN, "cold feet", "", "Sponsors got cold feet after the audit.", "",
           kIdiom, one),
      make("ts02", Language::EN, "cold feet", "", "The tiles give you cold feet in January.", "",
           kLiteral, one),
      make("ts03", Language::EN, "cold feet", "Rehearsal went badly.",
           "Actors fight Cold Feet on opening night.", "", kIdiom, one),
      make("ts04", Language::EN, "cold feet", "", "Hikers dread cold feet above the snow line.",
           "", kLiteral, one),
      make("ts05", Language::EN, "cold feet", "", "Buyers show cold feet when rates climb.", "",
           kIdiom, one),
      make("ts06", Language::PT, "fogo brando", "", "Mantiveram a rivalidade em fogo brando.", "",
           kIdiom, one),
      make("ts07", Language::PT, "fogo brando", "", "Derreta a manteiga em fogo brando.", "",
           kLiteral, one),
      make("ts08", Language::PT, "fogo brando", "A crise passou.",
           "A disputa ficou em fogo brando até a eleição.", "", kIdiom, one),
      make("ts09", Language::PT, "fogo brando", "", "O caramelo pede fogo brando e paciência.", "",
           kLiteral, one),
      make("ts10", Language::PT, "fogo brando", "", "Negociar em FOGO BRANDO evita rupturas.", "",
           kIdiom, one),
      make("ts11", Language::GL, "vento forte", "", "Era pura fachada, vento forte e nada máis.",
           "", kIdiom, one),
      make("ts12", Language::GL, "vento forte", "O temporal chegou.",
           "Un vento forte dobrou os piñeiros novos.", "", kLiteral, one),
      make("ts13", Language::GL, "vento forte", "", "Prometeu montes con vento forte de feira.",
           "", kIdiom, one),
      make("ts14", Language::GL, "vento forte", "", "Con vento forte non sae o barco pequeno.",
           "", kLiteral, one),
      make("ts15", Language::GL, "vento forte", "", "As present announced, discursos de vento forte.",
           "", kIdiom, one),
  };
  return corpus;
}

namespace {

const char* extension_for(TableFormat format) {
  return format == TableFormat::CSV ? ".csv" : ".tsv";
}

}  // namespace

void write_corpus_dir(const Corpus& corpus, const std::filesystem::path& dir, bool combined_train,
                      TableFormat format) {
  std::filesystem::create_directories(dir);
  const std::string ext = extension_for(format);
  if (combined_train) {
    spanprobe::save_corpus(dir / ("train" + ext), corpus.train, format);
  } else {
    std::vector<ExampleRecord> zero_rows;
    std::vector<ExampleRecord> one_rows;
    for (const ExampleRecord& record : corpus.train) {
      (record.setting_tag == Setting::ZERO_SHOT ? zero_rows : one_rows).push_back(record);
    }
    spanprobe::save_corpus(dir / ("train_zero_shot" + ext), zero_rows, format);
    spanprobe::save_corpus(dir / ("train_one_shot" + ext), one_rows, format);
  }
  spanprobe::save_corpus(dir / ("dev" + ext), corpus.dev, format);
  spanprobe::save_corpus(dir / ("test" + ext), corpus.test, format);
}

std::vector<spanprobe::PreparedExample> separable_examples(int per_class, int width,
                                                           int span_words, std::uint64_t seed,
                                                           double mu, double noise) {
  spanprobe::rng::Generator gen(seed);
  std::vector<spanprobe::PreparedExample> out;
  out.reserve(static_cast<std::size_t>(per_class) * 2);
  for (int i = 0; i < per_class * 2; ++i) {
    const int cls = i % 2;
    spanprobe::PreparedExample example;
    example.record_id = "sep" + std::to_string(i);
    example.language = Language::EN;
    example.label = static_cast<Label>(cls);
    example.span_vectors.resize(span_words, width);
    const double mean = cls == 0 ? mu : -mu;
    for (int r = 0; r < span_words; ++r) {
      for (int c = 0; c < width; ++c) {
        example.span_vectors(r, c) = mean + gen.next_uniform(-noise, noise);
      }
    }
    out.push_back(std::move(example));
  }
  return out;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const std::filesystem::path root = std::filesystem::temp_directory_path() / "spanprobe-tests";
  const int id = counter++;
  const std::filesystem::path dir =
      root / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(id));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
