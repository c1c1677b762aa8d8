def select(items, limit):
    return list(filter(lambda x: x.volume > limit, items))
