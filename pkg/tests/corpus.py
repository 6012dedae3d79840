"""A small mixed corpus for pipeline tests."""

SENTENCES = [
    "Harnblase leer.",
    "Harnleiter frei.",
    "Nierenoberflaeche glatt.",
    "Vorsteherdruese altersentsprechend.",
    "Leber dunkelrot.",
    "Blutanhaftungen an der Gekroesewurzel.",
    "kein ungehoeriger Inhalt in der Mundhoehle.",
    "Fertigen fester Koerper aus formlosem Stoff durch Schaffen des Zusammenhalts.",
    "Anwesend: Univ.-Prof. Dr. med. Dieter Krause, Direktor des Institutes fuer Rechtsmedizin.",
    "Gussstueck EN 1982 - CC333G - GS - XXXX",
    "Die Lunge ist blass und die Niere rot.",
    "Magen leer. Herz gross.",
    "Pi ist 3.14 gross.",
    "Der Befund & die <Leber> sind frei.",
]


def documents(count=20):
    """``count`` plain-text documents, each a few sentences long."""
    docs = []
    for i in range(count):
        picks = [SENTENCES[(i * 3 + k * 5) % len(SENTENCES)] for k in range(1 + i % 4)]
        docs.append(" ".join(picks) + "\n")
    return docs
