def accumulate_cost(items):
    result = 0
    index = 0
    while index < len(items):
        result = result + items[index].cost
        index += 1
    return result
