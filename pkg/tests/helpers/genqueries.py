"""Seeded random generator of small Spider-subset queries."""

import random

TABLES = ["singer", "concert", "stadium", "orders", "products", "people",
          "department", "course", "employee", "city"]
COLUMNS = ["name", "age", "year", "capacity", "salary", "grade", "price",
           "rating", "population", "category", "status", "country"]
AGGS = ["COUNT", "SUM", "AVG", "MIN", "MAX"]
CMPS = ["=", "!=", "<", ">", "<=", ">="]


def random_query(rng: random.Random, tiny: bool = False) -> str:
    """One random SELECT statement. ``tiny`` keeps normalized trees small
    enough for the exhaustive-matching oracle."""
    n_tables = 1 if tiny else rng.choice([1, 1, 1, 2])
    tables = rng.sample(TABLES, n_tables)
    aliased = not tiny and rng.random() < 0.5
    alias = {t: f"T{k + 1}" for k, t in enumerate(tables)} if aliased else {}

    def colref(table):
        col = rng.choice(COLUMNS)
        if n_tables > 1 or (not tiny and rng.random() < 0.3):
            return f"{alias.get(table, table)}.{col}"
        return col

    def item():
        roll = rng.random()
        if roll < 0.2:
            agg = rng.choice(AGGS)
            return f"{agg}(*)" if agg == "COUNT" and rng.random() < 0.5 \
                else f"{agg}({colref(tables[0])})"
        if roll < 0.25:
            return "*"
        return colref(rng.choice(tables))

    n_items = 1 if tiny and rng.random() < 0.7 else rng.randint(1, 2 if tiny else 3)
    items = ", ".join(item() for _ in range(n_items))

    sql = f"SELECT {items} FROM {tables[0]}"
    if aliased:
        sql = f"SELECT {items} FROM {tables[0]} AS {alias[tables[0]]}"
    if n_tables == 2:
        t2 = tables[1]
        src = f"{t2} AS {alias[t2]}" if aliased else t2
        left = f"{alias.get(tables[0], tables[0])}.{rng.choice(COLUMNS)}"
        right = f"{alias.get(t2, t2)}.{rng.choice(COLUMNS)}"
        sql += f" JOIN {src} ON {left} = {right}"

    def value():
        if rng.random() < 0.5:
            return str(rng.randint(1, 2020))
        return "'" + rng.choice(["usa", "rock", "Paris", "small", "A"]) + "'"

    if rng.random() < (0.5 if tiny else 0.7):
        clauses = [f"{colref(rng.choice(tables))} {rng.choice(CMPS)} {value()}"]
        if not tiny and rng.random() < 0.3:
            clauses.append(f"{colref(rng.choice(tables))} {rng.choice(CMPS)} {value()}")
        sql += " WHERE " + f" {rng.choice(['AND', 'OR'])} ".join(clauses)
    if rng.random() < (0.2 if tiny else 0.35):
        sql += f" GROUP BY {colref(rng.choice(tables))}"
        if not tiny and rng.random() < 0.4:
            sql += f" HAVING COUNT(*) {rng.choice(['>', '>='])} {rng.randint(1, 10)}"
    if rng.random() < (0.2 if tiny else 0.4):
        direction = rng.choice(["", " ASC", " DESC"])
        key = "COUNT(*)" if rng.random() < 0.3 else colref(rng.choice(tables))
        sql += f" ORDER BY {key}{direction}"
        if rng.random() < 0.5:
            sql += f" LIMIT {rng.randint(1, 10)}"
    return sql


def random_query_with_subquery(rng: random.Random) -> str:
    inner = random_query(rng, tiny=True)
    outer_table = rng.choice(TABLES)
    col = rng.choice(COLUMNS)
    return f"SELECT {col} FROM {outer_table} WHERE {col} IN ({inner})"
