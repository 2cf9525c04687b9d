import pytest

from nous.store import CURATED, KgStore, Namespace, Origin


@pytest.fixture
def drone_store() -> KgStore:
    """Small curated graph in the spirit of the drone-tracking use case."""
    store = KgStore()
    dji = store.create_entity("dji", ["company"], Origin.CURATED)
    drone = store.create_entity("drone", ["product"], Origin.CURATED)
    windermere = store.create_entity("windermere", ["company"], Origin.CURATED)
    camera = store.create_entity("camera", ["product"], Origin.CURATED)
    gopro = store.create_entity("gopro", ["company"], Origin.CURATED)
    manufactures = store.register_predicate("manufactures", Namespace.ONTOLOGY)
    uses = store.register_predicate("uses", Namespace.ONTOLOGY)
    sells = store.register_predicate("sells", Namespace.ONTOLOGY)
    store.add_fact(dji, manufactures, drone, 1.0, 0, CURATED)
    store.add_fact(gopro, manufactures, camera, 1.0, 0, CURATED)
    store.add_fact(windermere, uses, drone, 1.0, 0, CURATED)
    store.add_fact(dji, sells, camera, 1.0, 0, CURATED)
    return store
