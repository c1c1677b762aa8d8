def select(items, limit):
    return list(filter(lambda x: x.balance > limit, items))
