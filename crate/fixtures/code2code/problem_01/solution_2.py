def accumulate_age(items):
    result = 0
    index = 0
    while index < len(items):
        result = result + items[index].age
        index += 1
    return result
