import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kidsaudit.apk import DexClassIndex
from kidsaudit.errors import DuplicateName, EmptySignature
from kidsaudit.signatures import (TrackerSignature, build_database,
                                  load_database, match_code, match_host)


def brute_force_match_code(class_paths, db, substring=False):
    matched = set()
    for sig in db.signatures:
        for prefix in sig.code_signatures:
            for cls in class_paths:
                if (prefix in cls) if substring else cls.startswith(prefix):
                    matched.add(sig.name)
    return matched


def brute_force_match_host(hostname, db):
    matched = set()
    for sig in db.signatures:
        for domain in sig.network_signatures:
            if hostname == domain or hostname.endswith("." + domain):
                matched.add(sig.name)
    return matched


class TestLoadDatabase:
    def test_default_table_entries(self, default_db):
        adcolony = default_db.by_name("AdColony")
        assert adcolony.family_certified
        assert set(adcolony.code_signatures) == {"com/adcolony/",
                                                 "com/jirbo/adcolony/"}
        assert len(default_db.certified()) == 10

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "sigs.json"
        path.write_text(json.dumps([
            {"name": "X", "code_signatures": ["com/x/"],
             "family_certified": True},
        ]))
        db = load_database(path)
        assert db.names() == {"X"}
        assert db.certified() == {"X"}

    def test_empty_file_valid(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        db = load_database(path)
        assert db.names() == set()
        assert match_code(DexClassIndex({"com/x/Y"}), db) == set()

    def test_duplicate_name(self):
        sigs = [TrackerSignature("X", ["com/x/"]),
                TrackerSignature("X", ["com/y/"])]
        with pytest.raises(DuplicateName):
            build_database(sigs)

    def test_empty_signature(self):
        with pytest.raises(EmptySignature):
            build_database([TrackerSignature("X")])


class TestMatchCode:
    def test_adcolony_both_prefixes(self, default_db):
        assert match_code(DexClassIndex({"com/adcolony/Foo"}),
                          default_db) == {"AdColony"}
        assert match_code(DexClassIndex({"com/jirbo/adcolony/Bar"}),
                          default_db) == {"AdColony"}

    def test_no_match(self, default_db):
        assert match_code(DexClassIndex({"com/example/Main"}),
                          default_db) == set()

    def test_multiple_trackers(self, default_db):
        index = DexClassIndex({"com/unity3d/ads/X", "com/vungle/warren/Y"})
        result = match_code(index, default_db)
        assert result == {"Unity Ads", "Vungle"}
        assert result == brute_force_match_code(index.class_paths, default_db)

    def test_prefix_not_substring_by_default(self, default_db):
        # wrapped/renamed path does not start with the signature
        index = DexClassIndex({"shaded/com/adcolony/Foo"})
        assert match_code(index, default_db) == set()
        assert match_code(index, default_db,
                          substring=True) == {"AdColony"}

    def test_monotone_under_class_addition(self, default_db):
        base = {"com/adcolony/Foo"}
        more = base | {"com/appsflyer/X", "com/random/Y"}
        assert match_code(DexClassIndex(base), default_db) <= \
            match_code(DexClassIndex(more), default_db)

    @given(st.sets(st.sampled_from([
        "com/adcolony/Ad", "com/jirbo/adcolony/J", "com/adcolonyx/Fake",
        "com/applovin/sdk/A", "com/applovinx/B", "com/chartboost/sdk/C",
        "com/chartboost/other/D", "com/google/ads/E", "com/google/adsx/F",
        "com/unity3d/ads/G", "com/unity3d/services/H", "com/unity3d/player/I",
        "tv/superawesome/sdk/J", "tv/superawesome/other/K",
        "com/inmobi/L", "in/inmobi/M", "com/kidoz/sdk/N", "com/kidozx/O",
        "com/vungle/warren/P", "com/vungle/other/Q", "com/example/R",
        "org/random/S", "com/appsflyer/T", "io/branch/U",
    ]), max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_oracle_equivalence(self, class_paths):
        from kidsaudit.signatures import default_database
        db = default_database()
        index = DexClassIndex(set(class_paths))
        assert match_code(index, db) == \
            brute_force_match_code(class_paths, db)


class TestMatchHost:
    def test_adcolony_subdomain(self, default_db):
        assert match_host("ads.adcolony.com", default_db) == {"AdColony"}

    def test_label_alignment(self, default_db):
        assert match_host("notadcolony.com", default_db) == set()

    def test_inmobi_cdn(self, default_db):
        result = match_host("cdn.inmobicdn.net", default_db)
        assert result == {"InMobi"}
        assert result == brute_force_match_host("cdn.inmobicdn.net",
                                                default_db)

    def test_exact_domain(self, default_db):
        assert match_host("vungle.com", default_db) == {"Vungle"}

    @pytest.mark.parametrize("host", [
        "adcolony.com", "x.adcolony.com", "xadcolony.com", "example.org",
        "google.com", "www.google.com", "agoogle.com", "doubleclick.net",
        "app-measurement.com", "graph.facebook.com", "supersonicads.com",
    ])
    def test_oracle_equivalence(self, host, default_db):
        assert match_host(host, default_db) == \
            brute_force_match_host(host, default_db)


class TestPartition:
    def test_certified_partition(self, default_db):
        cert = default_db.certified()
        non = default_db.non_certified()
        assert cert | non == default_db.names()
        assert cert & non == set()


class TestRandomizedOracle:
    def test_thousand_random_indexes(self, default_db):
        rng = random.Random(20240817)
        prefixes = [p for s in default_db.signatures
                    for p in s.code_signatures]
        tails = ["Foo", "bar/Baz", "a/b/C", "X"]
        for _ in range(1000):
            paths = set()
            for _ in range(rng.randint(0, 12)):
                kind = rng.random()
                if kind < 0.4:
                    paths.add(rng.choice(prefixes) + rng.choice(tails))
                elif kind < 0.6:
                    # near miss: mangle one char of a real prefix
                    p = rng.choice(prefixes)
                    i = rng.randrange(len(p))
                    paths.add(p[:i] + "z" + p[i + 1:] + "Tail")
                else:
                    paths.add("com/%s/%s" % (
                        "".join(rng.choices("abcdefgh", k=6)),
                        rng.choice(tails)))
            index = DexClassIndex(paths)
            assert match_code(index, default_db) == \
                brute_force_match_code(paths, default_db)
