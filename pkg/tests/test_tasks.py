import json
import random

import pytest

from verseproj.onf import CorefMention, OnfSentence, PropArg, PropInstance, parse_tree
from verseproj.scripture import VerseLabel
from verseproj.tasks import (Task, TaskInstance, cap_label, export_bundle, gen_sac,
                             gen_ss, nmc_label, pns_label, read_instances,
                             sense_usages, sm_label, split_dataset)


def sentence_from_tree(sexpr: str, index: int = 0) -> OnfSentence:
    tree = parse_tree(sexpr)
    tokens = [(leaf.surface, leaf.label) for leaf in tree.non_empty_leaves()]
    return OnfSentence(index=index, plain_text=" ".join(t[0] for t in tokens),
                       tokens=tokens, tree=tree)


def corpus_sentences(corpus_docs, doc_id):
    return next(d for d in corpus_docs if d.doc_id == doc_id).sentences


class TestNmc:
    def test_figure1(self, figure1_doc):
        assert nmc_label([figure1_doc.sentences[0]]) == 1

    def test_single_pronoun_mention(self):
        sentence = sentence_from_tree("(S (NP-SBJ (PRP he)) (VP (VBD wept)))")
        sentence.mentions.append(CorefMention("IDENT", 4, 0, 0))
        assert nmc_label([sentence]) == 0

    def test_hand_corpus_counts(self, corpus_docs):
        jhn = corpus_sentences(corpus_docs, "jhn/11")
        # Hand counts per verse (verse 37 spans sentences 5 and 6).
        assert nmc_label([jhn[0]]) == 2
        assert nmc_label([jhn[1]]) == 0
        assert nmc_label([jhn[2]]) == 0
        assert nmc_label([jhn[3]]) == 1
        assert nmc_label([jhn[4]]) == 1
        assert nmc_label([jhn[5], jhn[6]]) == 1
        assert nmc_label([jhn[7]]) == 0
        assert nmc_label([jhn[8]]) == 1
        assert nmc_label([jhn[9]]) == 1

    def test_matches_brute_force_recount(self, corpus_docs):
        pronoun_tags = {"PRP", "PRP$", "WP", "WP$", "DT"}
        for doc in corpus_docs:
            for sentence in doc.sentences:
                expected = 0
                for mention in sentence.mentions:
                    span = range(mention.start_token, mention.end_token + 1)
                    tags = {sentence.tokens[i][1] for i in span}
                    if len(span) == 1 and tags & pronoun_tags:
                        continue
                    expected += 1
                assert nmc_label([sentence]) == expected


class TestPns:
    def test_figure1(self, figure1_doc):
        assert pns_label(figure1_doc.sentences[0]) == 1

    def test_common_noun_head_with_embedded_proper_noun(self):
        sentence = sentence_from_tree(
            "(S (NP-SBJ (NP (NNS scholars)) (PP (IN from) (NP (NNP Burundi))))"
            " (VP (VBD spoke)) (. .))")
        assert pns_label(sentence) == 1

    def test_no_subject_is_skipped(self):
        sentence = sentence_from_tree("(FRAG (NP (DT the) (NN end)) (. .))")
        assert pns_label(sentence) is None

    def test_multiple_subjects_skipped_under_coordination(self, corpus_docs):
        mat = corpus_sentences(corpus_docs, "mat/9")
        assert pns_label(mat[5]) is None  # two coordinated clauses

    def test_embedded_subject_not_searched(self, corpus_docs):
        jhn = corpus_sentences(corpus_docs, "jhn/11")
        # Cleft: root subject is "It"; the relative-clause subject is ignored.
        assert pns_label(jhn[8]) == 0

    def test_question_with_sq_subject_skipped(self, corpus_docs):
        # SBARQ root: the subject sits inside SQ, not at the root.
        jhn = corpus_sentences(corpus_docs, "jhn/11")
        assert pns_label(jhn[2]) is None

    def test_trace_only_subject_is_negative(self, corpus_docs):
        jhn = corpus_sentences(corpus_docs, "jhn/11")
        assert pns_label(jhn[7]) == 0  # imperative with empty subject


class TestSm:
    @pytest.mark.parametrize("root,expected", [
        ("S", 0), ("S-CLF", 0), ("S-IMP", 2), ("SQ", 1), ("SBARQ", 1), ("SQ-CLF", 1),
        ("FRAG", None), ("NP", None), ("X", None), ("SINV", None), ("SBAR", None),
    ])
    def test_mapping(self, root, expected):
        sentence = sentence_from_tree(f"({root} (NN word))")
        assert sm_label(sentence) == expected

    def test_corpus_examples(self, corpus_docs, figure1_doc):
        assert sm_label(figure1_doc.sentences[0]) == 0
        jhn = corpus_sentences(corpus_docs, "jhn/11")
        assert sm_label(jhn[2]) == 1   # SBARQ
        assert sm_label(jhn[7]) == 2   # S-IMP
        assert sm_label(jhn[8]) == 0   # S-CLF
        assert sm_label(jhn[9]) == 1   # SQ


class TestSenseUsages:
    def test_figure1(self, figure1_doc):
        assert sense_usages([figure1_doc.sentences[0]]) == [("cry.02", 1)]

    def test_no_props(self):
        assert sense_usages([sentence_from_tree("(S (NN word))")]) == []

    def test_repeated_sense_in_token_order(self):
        sentence = sentence_from_tree(
            "(S (NP-SBJ (NNP He)) (VP (VBD prayed) (VP (VBD saw) (VBD prayed))))")
        sentence.props = [
            PropInstance(3, "pray.01", [PropArg("v", 3, 0)]),
            PropInstance(1, "pray.01", [PropArg("v", 1, 0), PropArg("ARG0", 0, 1)]),
            PropInstance(2, "see.01", [PropArg("v", 2, 0), PropArg("ARG0", 0, 1),
                                       PropArg("ARG1", 3, 0)]),
        ]
        usages = sense_usages([sentence])
        assert usages == [("pray.01", 1), ("see.01", 2), ("pray.01", 0)]
        # Brute-force enumeration of the prop annotations, sense by sense.
        flat = sorted((p.head_token, p.sense_label,
                       sum(1 for a in p.args if a.role != "v"))
                      for p in sentence.props)
        assert [(s, n) for _, s, n in flat] == usages

    def test_numbered_args_only(self):
        sentence = sentence_from_tree("(S (NNP He) (VBD prayed) (RB there))")
        sentence.props = [PropInstance(1, "pray.01", [
            PropArg("v", 1, 0), PropArg("ARG0", 0, 1), PropArg("ARGM-LOC", 2, 0)])]
        assert sense_usages([sentence]) == [("pray.01", 2)]
        assert sense_usages([sentence], numbered_args_only=True) == [("pray.01", 1)]


def make_sense_corpus(seed: int, n_verses: int = 50):
    """Synthetic verse -> usages fixture with overlapping senses."""
    rng = random.Random(seed)
    lemmas = ["go.01", "say.01", "pray.01", "see.01", "cry.02", "know.01",
              "stand.03", "come.01"]
    corpus = {}
    texts = {}
    for i in range(1, n_verses + 1):
        verse = VerseLabel.simple("MAT", 1 + i // 30, 1 + i % 30)
        usages = [(rng.choice(lemmas), rng.randrange(0, 4))
                  for _ in range(rng.randrange(0, 4))]
        corpus[verse] = usages
        texts[verse] = f"verse text {i}"
    return corpus, texts


class TestGenSs:
    def test_forced_draws(self):
        v1 = VerseLabel.simple("JHN", 1, 1)
        v2 = VerseLabel.simple("JHN", 1, 2)
        v3 = VerseLabel.simple("JHN", 1, 3)
        corpus = {v1: [("go.01", 1)], v2: [("go.01", 2)], v3: [("say.01", 0)]}
        texts = {v: str(v) for v in corpus}
        instances = [i for i in gen_ss(corpus, texts, seed=1) if i.verse_1 == v1]
        assert len(instances) == 2
        positive, negative = instances
        assert (positive.label, positive.verse_2) == (1, v2)
        assert (negative.label, negative.verse_2) == (0, v3)
        assert positive.sense == "go.01"

    def test_lone_sense_dropped(self):
        v1 = VerseLabel.simple("JHN", 1, 1)
        v2 = VerseLabel.simple("JHN", 1, 2)
        corpus = {v1: [("go.01", 1)], v2: [("say.01", 0)]}
        texts = {v: str(v) for v in corpus}
        assert gen_ss(corpus, texts, seed=1) == []

    def test_empty_corpus(self):
        assert gen_ss({}, {}, seed=1) == []

    def test_brute_force_verification(self):
        corpus, texts = make_sense_corpus(seed=7)
        senses_of = {v: {s for s, _ in usages} for v, usages in corpus.items()}
        instances = gen_ss(corpus, texts, seed=13)
        assert instances
        for inst in instances:
            assert inst.sense in senses_of[inst.verse_1]
            assert inst.verse_2 != inst.verse_1
            assert inst.label == int(inst.sense in senses_of[inst.verse_2])
            assert inst.text_1 == texts[inst.verse_1]
            assert inst.text_2 == texts[inst.verse_2]
        n_pos = sum(i.label for i in instances)
        assert abs(n_pos - (len(instances) - n_pos)) <= 1

    def test_deterministic(self):
        corpus, texts = make_sense_corpus(seed=7)
        assert gen_ss(corpus, texts, seed=13) == gen_ss(corpus, texts, seed=13)
        assert gen_ss(corpus, texts, seed=13) != gen_ss(corpus, texts, seed=14)


class TestGenSac:
    def test_equal_counts(self):
        v1 = VerseLabel.simple("JHN", 1, 1)
        v2 = VerseLabel.simple("JHN", 1, 2)
        v3 = VerseLabel.simple("JHN", 1, 3)
        corpus = {v1: [("go.01", 2)], v2: [("go.01", 2)], v3: [("go.01", 3)]}
        texts = {v: str(v) for v in corpus}
        instances = [i for i in gen_sac(corpus, texts, seed=1) if i.verse_1 == v1]
        positive = next(i for i in instances if i.label == 1)
        negative = next(i for i in instances if i.label == 0)
        assert positive.verse_2 == v2
        assert negative.verse_2 == v3

    def test_unequal_counts_label_zero(self):
        # Label compares first usages: (2, 3) differs.
        v1 = VerseLabel.simple("JHN", 1, 1)
        v2 = VerseLabel.simple("JHN", 1, 2)
        v3 = VerseLabel.simple("JHN", 1, 3)
        corpus = {v1: [("go.01", 2)], v2: [("go.01", 3)], v3: [("go.01", 2)]}
        texts = {v: str(v) for v in corpus}
        for inst in gen_sac(corpus, texts, seed=1):
            if inst.verse_1 == v1 and inst.verse_2 == v2:
                assert inst.label == 0

    def test_brute_force_verification(self):
        corpus, texts = make_sense_corpus(seed=21)
        first_counts = {}
        for verse, usages in corpus.items():
            counts = {}
            for sense, n in usages:
                counts.setdefault(sense, n)
            first_counts[verse] = counts
        instances = gen_sac(corpus, texts, seed=5)
        assert instances
        for inst in instances:
            assert inst.sense in first_counts[inst.verse_1]
            assert inst.sense in first_counts[inst.verse_2]
            assert inst.verse_2 != inst.verse_1
            same = first_counts[inst.verse_1][inst.sense] == \
                first_counts[inst.verse_2][inst.sense]
            assert inst.label == int(same)
        n_pos = sum(i.label for i in instances)
        assert abs(n_pos - (len(instances) - n_pos)) <= 1


def make_instances(n: int, task: Task = Task.NMC) -> list[TaskInstance]:
    return [TaskInstance(task, VerseLabel.simple("MAT", 1 + i // 25, 1 + i % 25),
                         f"text {i}", label=i % 4) for i in range(n)]


class TestSplit:
    def test_exact_ratio(self):
        bundle = split_dataset(make_instances(10), (0.8, 0.1, 0.1), seed=3)
        assert [len(bundle.splits[s]) for s in ("train", "dev", "test")] == [8, 1, 1]

    def test_deterministic(self):
        a = split_dataset(make_instances(40), seed=3)
        b = split_dataset(make_instances(40), seed=3)
        assert a.splits == b.splits

    def test_input_order_irrelevant(self):
        instances = make_instances(40)
        shuffled = list(reversed(instances))
        assert split_dataset(instances, seed=3).splits == \
            split_dataset(shuffled, seed=3).splits

    def test_seeds_differ_sizes_hold(self):
        instances = make_instances(1000)
        a = split_dataset(instances, seed=1)
        b = split_dataset(instances, seed=2)
        assert a.splits != b.splits
        for bundle in (a, b):
            sizes = [len(bundle.splits[s]) for s in ("train", "dev", "test")]
            assert abs(sizes[0] - 800) <= 1
            assert abs(sizes[1] - 100) <= 1
            assert abs(sizes[2] - 100) <= 1

    def test_disjoint_and_covering(self):
        instances = make_instances(97)
        bundle = split_dataset(instances, seed=5)
        recombined = bundle.all_instances()
        assert len(recombined) == 97
        assert sorted(i.identity() for i in recombined) == \
            sorted(i.identity() for i in instances)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            split_dataset([], seed=1)

    def test_bad_ratios_rejected(self):
        with pytest.raises(ValueError):
            split_dataset(make_instances(5), (0.5, 0.2, 0.2), seed=1)


class TestExport:
    def test_nmc_capping(self, tmp_path):
        instances = [TaskInstance(Task.NMC, VerseLabel.simple("MAT", 1, 1 + i),
                                  f"t{i}", label=i) for i in range(6)]
        bundle = split_dataset(instances, (1.0, 0.0, 0.0), seed=1)
        export_bundle(bundle, tmp_path, cap=3)
        raw = read_instances(tmp_path / "nmc.train.jsonl")
        capped = read_instances(tmp_path / "nmc.train.cap3.jsonl")
        assert sorted(i.label for i in raw) == [0, 1, 2, 3, 4, 5]
        assert sorted(i.label for i in capped) == [0, 1, 2, 3, 3, 3]
        by_verse_raw = {i.verse_1: i.label for i in raw}
        by_verse_capped = {i.verse_1: i.label for i in capped}
        for verse, label in by_verse_raw.items():
            assert by_verse_capped[verse] == min(label, 3)

    def test_no_cap_no_file(self, tmp_path):
        bundle = split_dataset(make_instances(6), (1.0, 0.0, 0.0), seed=1)
        export_bundle(bundle, tmp_path, cap=None)
        assert not list(tmp_path.glob("*cap*"))

    def test_roundtrip(self, tmp_path):
        corpus, texts = make_sense_corpus(seed=3)
        instances = gen_ss(corpus, texts, seed=3)
        bundle = split_dataset(instances, seed=3)
        export_bundle(bundle, tmp_path)
        for name in ("train", "dev", "test"):
            assert read_instances(tmp_path / f"ss.{name}.jsonl") == bundle.splits[name]

    def test_schema_nulls(self, tmp_path):
        bundle = split_dataset(make_instances(2), (1.0, 0.0, 0.0), seed=1)
        export_bundle(bundle, tmp_path)
        record = json.loads((tmp_path / "nmc.train.jsonl").read_text().splitlines()[0])
        assert set(record) == {"task", "verse_1", "text_1", "verse_2", "text_2",
                               "sense", "label"}
        assert record["verse_2"] is None and record["sense"] is None

    def test_cap_monotone_idempotent(self):
        for x in range(0, 10):
            assert cap_label(cap_label(x, 3), 3) == cap_label(x, 3)
            assert cap_label(x, 3) <= x
            if x:
                assert cap_label(x, 3) >= cap_label(x - 1, 3)


class TestInstanceInvariants:
    def test_pair_tasks_need_pair_fields(self):
        with pytest.raises(ValueError, match="verse_2"):
            TaskInstance(Task.SS, VerseLabel.simple("MAT", 1, 1), "t", label=1)

    def test_label_ranges(self):
        verse = VerseLabel.simple("MAT", 1, 1)
        with pytest.raises(ValueError, match="out of range"):
            TaskInstance(Task.SM, verse, "t", label=3)
        with pytest.raises(ValueError, match="out of range"):
            TaskInstance(Task.PNS, verse, "t", label=2)
        with pytest.raises(ValueError, match="out of range"):
            TaskInstance(Task.NMC, verse, "t", label=-1)
        TaskInstance(Task.NMC, verse, "t", label=17)  # counts are uncapped
