def select(items, limit):
    return list(filter(lambda x: x.priority > limit, items))
