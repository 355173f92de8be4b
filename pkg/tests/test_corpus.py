"""Corpus format tests: parsing, round trips, chunks, folds."""

import random

import pytest

from chunklet.corpus import (
    Corpus,
    extract_chunks,
    format_tree,
    load_corpus,
    make_folds,
    parse_bracketed,
    read_symbols,
    read_tagged,
    save_corpus,
    write_tagged,
)
from chunklet.errors import FormatError, VocabularyError
from chunklet.tags import NO_CAT, StructuralTag, TagSequence
from chunklet.trees import ChunkTree, Leaf, Node

from treegen import random_canonical_tree


def test_parse_bracketed_nested_pp():
    tree = parse_bracketed("(PP (APPR mit) (NP (ART der) (NN Zeit)))")
    assert tree == ChunkTree(
        (
            Node(
                "PP",
                (
                    Leaf("APPR", "mit"),
                    Node("NP", (Leaf("ART", "der"), Leaf("NN", "Zeit"))),
                ),
            ),
        )
    )


def test_parse_bracketed_top_level_mix():
    tree = parse_bracketed("(NP (ART der) (NN Mann)) (VVFIN kam)")
    assert len(tree.items) == 2
    assert isinstance(tree.items[1], Leaf)
    assert tree.items[1].pos == "VVFIN"


def test_parse_bracketed_edges_round_trip():
    text = "(NP-SB (ART-NK der) (NN-NK Mann))"
    tree = parse_bracketed(text)
    assert tree.items[0].edge == "SB"
    assert tree.items[0].children[0].edge == "NK"
    assert format_tree(tree) == text


def test_parse_errors():
    with pytest.raises(FormatError):
        parse_bracketed("(NP (ART der) Mann)")  # bare word inside a node
    with pytest.raises(FormatError):
        parse_bracketed("(NP (ART der)")  # unbalanced
    with pytest.raises(FormatError):
        parse_bracketed("(NP)")


def test_bracketed_corpus_round_trip(tmp_path):
    rng = random.Random(7)
    trees = tuple(random_canonical_tree(rng, with_words=True) for _ in range(40))
    corpus = Corpus(trees)
    path = tmp_path / "c.brackets"
    save_corpus(corpus, path)
    again = load_corpus(path)
    assert again.sentences == trees


def test_columnar_corpus_round_trip(tmp_path):
    rng = random.Random(8)
    trees = tuple(random_canonical_tree(rng, with_words=True) for _ in range(40))
    corpus = Corpus(trees)
    path = tmp_path / "c.cols"
    save_corpus(corpus, path, format="columnar")
    again = load_corpus(path, format="columnar")
    assert again.sentences == trees
    assert again.diagnostics == ()


def test_columnar_flat_np(tmp_path):
    path = tmp_path / "np.cols"
    path.write_text(
        "word\tpos\trel\tcat\nder\tART\t1\tNP\nMann\tNN\t0\tNP\n",
        encoding="utf-8",
    )
    corpus = load_corpus(path, format="columnar")
    assert corpus.sentences == (
        ChunkTree((Node("NP", (Leaf("ART", "der"), Leaf("NN", "Mann"))),)),
    )


def test_columnar_repairs_become_diagnostics(tmp_path):
    path = tmp_path / "bad.cols"
    path.write_text(
        "word\tpos\trel\tcat\nkam\tVVFIN\t1\tNONE\nder\tART\t+\tNP\n",
        encoding="utf-8",
    )
    corpus = load_corpus(path, format="columnar")
    assert len(corpus.diagnostics) == 1
    assert "close-without-chunk" in corpus.diagnostics[0]


def test_write_tagged_empty_is_header_only(tmp_path):
    path = tmp_path / "empty.cols"
    write_tagged([], path)
    assert path.read_text(encoding="utf-8") == "word\tpos\trel\tcat\n"
    assert read_tagged(path) == []


def test_tagged_round_trip(tmp_path):
    seqs = [
        TagSequence(
            (StructuralTag("APPR", "1", "PP"), StructuralTag("NN", "-", "NP")),
            ("mit", None),
        ),
        TagSequence((StructuralTag("VVFIN", "1", NO_CAT),)),
    ]
    path = tmp_path / "t.cols"
    write_tagged(seqs, path)
    assert read_tagged(path) == seqs


def test_read_tagged_requires_header(tmp_path):
    path = tmp_path / "nohdr.cols"
    path.write_text("der\tART\t1\tNP\n", encoding="utf-8")
    with pytest.raises(FormatError):
        read_tagged(path)


def test_read_tagged_rejects_bad_rel(tmp_path):
    path = tmp_path / "badrel.cols"
    path.write_text("word\tpos\trel\tcat\nder\tART\t?\tNP\n", encoding="utf-8")
    with pytest.raises(FormatError) as err:
        read_tagged(path)
    assert err.value.line == 2


def test_vocabulary_checked_at_load(tmp_path):
    path = tmp_path / "v.brackets"
    path.write_text("(NP (XYZ der) (NN Mann))\n", encoding="utf-8")
    with pytest.raises(VocabularyError) as err:
        load_corpus(path, tagset=("ART", "NN"), labelset=("NP",))
    assert "XYZ" in str(err.value)
    # without a declared tagset the same file loads
    assert len(load_corpus(path)) == 1


def test_reserved_symbols_rejected(tmp_path):
    path = tmp_path / "r.brackets"
    path.write_text("(NONE (ART der))\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_corpus(path)


def test_deep_tree_rejected_at_load(tmp_path):
    path = tmp_path / "deep.brackets"
    path.write_text("(NP (NP (NP (NP (NP (NN x))))))\n", encoding="utf-8")
    with pytest.raises(FormatError) as err:
        load_corpus(path)
    assert "depth" in str(err.value)


def test_extract_chunks_takes_maximal_nodes():
    sentence = parse_bracketed(
        "(S (NP (ART die) (NN Frau)) (VVFIN sah) "
        "(PP (APPR mit) (NP (ART dem) (NN Glas))))"
    )
    corpus = Corpus((sentence,))
    chunks = extract_chunks(corpus)
    labels = [tree.items[0].label for tree in chunks]
    assert labels == ["NP", "PP"]
    # the NP inside the PP is not extracted separately
    assert len(chunks) == 2
    assert format_tree(chunks[1]) == "(PP (APPR mit) (NP (ART dem) (NN Glas)))"


def test_extract_chunks_custom_categories():
    sentence = parse_bracketed("(S (AP (ADV ganz) (ADJA alt)) (NM (CARD 50) (CARD 000)))")
    chunks = extract_chunks(Corpus((sentence,)), categories=("NM",))
    assert len(chunks) == 1
    assert chunks[0].items[0].label == "NM"


def test_make_folds_partition_and_sizes():
    plan = make_folds(25, 10, seed=3)
    sizes = [plan.assignment.count(f) for f in range(10)]
    assert sum(sizes) == 25
    assert max(sizes) - min(sizes) <= 1
    train, test = plan.fold(0)
    assert sorted(train + test) == list(range(25))
    assert set(train).isdisjoint(test)


def test_make_folds_deterministic():
    a = make_folds(100, 10, seed=42)
    b = make_folds(100, 10, seed=42)
    c = make_folds(100, 10, seed=43)
    assert a.assignment == b.assignment
    assert a.assignment != c.assignment


def test_read_symbols(tmp_path):
    path = tmp_path / "s.tags"
    path.write_text("# comment\nART\n\nNN\n", encoding="utf-8")
    assert read_symbols(path) == ("ART", "NN")
